#ifndef MACFB_TRAJECTORY_HPP
#define MACFB_TRAJECTORY_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "macfb/channel.hpp"
#include "macfb/pmf.hpp"

namespace macfb {

// Causal input policy of one user: a conditional pmf p(x_l | x^{l-1}, y^{l-1})
// per stage. Tables are row-major over (own history ascending, output history
// ascending, x_l fastest); histories a policy does not use are not stored.
struct CausalPolicy {
    int input_size = 2;
    int output_size = 2;
    int horizon = 1;
    bool uses_own_history = false;
    bool uses_feedback = false;
    std::vector<std::vector<double>> tables;  // tables[l-1]

    static CausalPolicy iid(std::vector<double> marginal, int horizon, int output_size);
    static CausalPolicy uniform(int input_size, int horizon, int output_size);

    std::size_t row_count(int stage) const;  // stage is 1-based
    double prob(int stage, std::span<const int> own_hist, std::span<const int> y_hist,
                int x) const;
    void validate(double tol = 1e-9) const;

    static CausalPolicy from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// One trajectory variable: users 0..2 are inputs, kOutputVar the output.
inline constexpr int kOutputVar = 3;
struct TrajAxis {
    int var = 0;   // 0..2 or kOutputVar
    int time = 1;  // 1-based
    bool operator==(const TrajAxis&) const = default;
};
std::string traj_axis_name(const TrajAxis& a);  // "X1@2", "Y@3"

inline constexpr std::uint64_t kTrajectoryCap = std::uint64_t(1) << 24;

// Joint law of (X_1^L, X_2^L, X_3^L, Y^L) induced by three causal policies
// driving a memoryless channel. Marginals are computed by a forward pass
// that keeps only axes still needed, so small marginals of trajectory
// spaces far beyond the dense cap stay cheap.
class TrajectoryLaw {
  public:
    TrajectoryLaw(TableChannel channel, std::array<CausalPolicy, 3> policies, int horizon,
                  std::uint64_t cap = kTrajectoryCap);

    int horizon() const { return horizon_; }
    const TableChannel& channel() const { return channel_; }

    JointPmf marginal(std::vector<TrajAxis> request) const;

    // Dense joint over every axis; guarded by the tensor cap.
    JointPmf full_joint() const;

    double output_entropy() const;  // H(Y^L)

    // H(Y^L || X_A^L) for A a subset of {0,1,2}. With A = {0,1,2} the
    // stage terms collapse to channel-row entropies (memorylessness).
    double causally_conditioned_entropy(std::span<const int> users) const;

    double directed_info_rate() const;  // I(X^L -> Y^L) / L, all users

  private:
    TableChannel channel_;
    std::array<CausalPolicy, 3> policies_;
    int horizon_;
    std::uint64_t cap_;
};

// Builds the full trajectory joint; equivalent to TrajectoryLaw::full_joint.
JointPmf build_trajectory_pmf(const TableChannel& channel,
                              const std::array<CausalPolicy, 3>& policies, int horizon,
                              std::uint64_t cap = kTrajectoryCap);

}  // namespace macfb

#endif  // MACFB_TRAJECTORY_HPP
