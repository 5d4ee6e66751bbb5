#ifndef MACFB_PMF_HPP
#define MACFB_PMF_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "macfb/common.hpp"

namespace macfb {

struct Axis {
    std::string name;
    int size = 1;
};

// Dense joint pmf over named finite axes. Row-major storage, last axis
// fastest. Values are nonnegative; a distribution carries total mass 1.
class JointPmf {
  public:
    JointPmf() : probs_{1.0} {}
    JointPmf(std::vector<Axis> axes, std::vector<double> probs);

    static JointPmf zeros(std::vector<Axis> axes);

    const std::vector<Axis>& axes() const { return axes_; }
    std::size_t rank() const { return axes_.size(); }
    std::size_t size() const { return probs_.size(); }
    std::span<const double> probs() const { return probs_; }
    std::vector<double>& data() { return probs_; }

    std::size_t axis_index(const std::string& name) const;
    bool has_axis(const std::string& name) const;
    std::size_t stride(std::size_t axis) const { return strides_[axis]; }

    double& at(std::span<const int> coords) { return probs_[flat_index(coords)]; }
    double value(std::span<const int> coords) const { return probs_[flat_index(coords)]; }
    std::size_t flat_index(std::span<const int> coords) const;

    double total_mass() const;
    void validate(double tol = 1e-12) const;

    // Marginal over the named axes, keeping this pmf's axis order.
    JointPmf marginal(const std::vector<std::string>& keep) const;

    // Appends a deterministic axis computed from existing axes.
    JointPmf with_derived_axis(const std::string& name, int size,
                               const std::vector<std::string>& sources,
                               const std::function<int(std::span<const int>)>& fn) const;

    static JointPmf from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

  private:
    void rebuild_strides();

    std::vector<Axis> axes_;
    std::vector<std::size_t> strides_;
    std::vector<double> probs_;
};

// Shannon measures in bits, 0 log 0 = 0. Variable sets are axis names.
double entropy(const JointPmf& p, const std::vector<std::string>& vars);
double conditional_entropy(const JointPmf& p, const std::vector<std::string>& a,
                           const std::vector<std::string>& b);
double mutual_info(const JointPmf& p, const std::vector<std::string>& a,
                   const std::vector<std::string>& b,
                   const std::vector<std::string>& cond = {});

// Axes grouped by time step, ascending; group t may be empty.
using TimeGroups = std::vector<std::vector<std::string>>;

// H(Y^n || X^n) = sum_k H(Y_k | Y^{k-1}, X^k). Pass x = {} (or all-empty
// groups) for plain H(Y^n) accumulated stage by stage.
double causal_entropy(const JointPmf& p, const TimeGroups& y, const TimeGroups& x);

// I(X^n -> Y^n) = H(Y^n) - H(Y^n || X^n).
double directed_info(const JointPmf& p, const TimeGroups& y, const TimeGroups& x);

// I(X^n -> Y^n || Z^n) = H(Y^n || Z^n) - H(Y^n || X^n Z^n).
double directed_info_conditioned(const JointPmf& p, const TimeGroups& y, const TimeGroups& x,
                                 const TimeGroups& z);

double normalized_directed_info(const JointPmf& p, const TimeGroups& y, const TimeGroups& x);

}  // namespace macfb

#endif  // MACFB_PMF_HPP
