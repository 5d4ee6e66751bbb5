#ifndef MACFB_REGION_HPP
#define MACFB_REGION_HPP

#include <array>
#include <string>
#include <vector>

#include "macfb/channel.hpp"
#include "macfb/pmf.hpp"
#include "macfb/trajectory.hpp"

namespace macfb {

// One half-space a . (R1,R2,R3) <= bound, bound in bits. The individual
// mutual-information terms that built the bound stay inspectable.
struct RateConstraint {
    std::array<double, 3> coeff{};
    double bound = 0;
    std::string name;    // "R1", "R1+R3", "R1+R2+R3", ...
    std::string family;  // which bound family produced it
    std::vector<double> terms;
    std::vector<std::string> term_names;
};

struct RatePolytope {
    std::vector<RateConstraint> constraints;

    // Largest t with (t,t,t) inside.
    double diagonal_boundary() const;

    nlohmann::json to_json() const;
    // Columns: name, family, c1, c2, c3, bound, diagonal_intercept.
    std::string diagonal_csv() const;
};

struct ContainsResult {
    bool inside = false;
    double min_slack = 0;   // most negative = most violated
    std::string tightest;   // constraint name with the smallest slack
    std::vector<double> slacks;
};

ContainsResult polytope_contains(const RatePolytope& poly, const std::array<double, 3>& point,
                                 double tol = 1e-9);

// Symmetric rate triple (1-h(delta)) * (1,1,1).
std::array<double, 3> corner_point(double delta);

// Leading-order bound on the fraction of positions whose sum-mismatch
// probability exceeds c, for schemes within eps of the symmetric corner:
// 3 eps / (2 c (1 - h(delta))). Diagnostic only; the vanishing remainder
// term is omitted.
double state_mismatch_fraction_bound(double eps, double c, double delta);

// Biases of the per-user message sources W_i; they only enter through the
// ratio (H(W_i)+H(W_j)) / H(W_i xor W_j).
struct SourceConfig {
    std::array<double, 3> w_bias{0.5, 0.5, 0.5};

    double ratio(int i, int j) const;  // users in {0,1,2}
    void validate() const;
};

enum class VMode {
    coupled,      // current-block V_i = tilde T_j ^ tilde T_k
    independent,  // V triple drawn fresh from v_law, decoupled from the tilde block
};

// Input distribution family for the achievable-region evaluator:
//   p(u) p(v1,v2,v3) prod_i p(t_i) p(x_i | u, t_i, v_i)  x  channel.
// T_i are i.i.d. uniform bits; (V1,V2,V3) is uniform on the four
// even-parity triples (000, 011, 101, 110) unless a custom pairwise-
// independent law is supplied.
struct QlcInputLaw {
    std::vector<double> p_u{1.0};
    std::array<std::vector<double>, 3> x_given;  // [(u,t,v) row-major] -> pmf over x_i
    TableChannel channel;
    VMode v_mode = VMode::coupled;
    std::array<double, 4> v_law{0.25, 0.25, 0.25, 0.25};  // over even-parity triple index

    int u_size() const { return static_cast<int>(p_u.size()); }
    int x_size(int user) const { return channel.input_sizes[static_cast<std::size_t>(user)]; }
    double x_prob(int user, int u, int t, int v, int x) const;
    void validate() const;

    // Deterministic map x_i = (t_i, v_i) as a bit pair; the natural law for
    // the parity-gated channel.
    static QlcInputLaw bit_pair_default(TableChannel channel, int u_size = 2);

    static QlcInputLaw from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

inline constexpr int kMaxUSize = 4;
inline constexpr std::array<std::array<int, 3>, 4> kEvenParityTriples{
    {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};

// Two-block variables. Tilde axes describe the previous block; V1..V3 are
// the current block's coset offsets, equal to sums of tilde T's when the
// coupling is on. TSum axes are derived current-block T_i ^ T_j bits.
enum class RVar {
    TildeU, TildeT1, TildeT2, TildeT3, TildeVIdx, TildeX1, TildeX2, TildeX3, TildeY,
    V1, V2, V3,
    U, T1, T2, T3, X1, X2, X3, Y,
    TSum12, TSum13, TSum23,
};
std::string rvar_name(RVar v);

// Single-block joint (U, T1..T3, VIdx, X1..X3, Y).
JointPmf single_block_joint(const QlcInputLaw& law);

// Dense marginal of the two-block construction over the requested
// variables, assembled without materializing the full two-block joint.
JointPmf two_block_marginal(const QlcInputLaw& law, const std::vector<RVar>& vars);

// The 13-constraint achievable region evaluated on the two-block joint:
// 7 subset bounds plus two families of 3 pairwise bounds.
RatePolytope qlc_region(const QlcInputLaw& law, const SourceConfig& src = {});

// Reduction path used for cross-checks: the same bounds with the V
// conditioning removed, evaluated on the single-block joint. Matches
// qlc_region exactly when the law's conditionals ignore v.
RatePolytope cl_region(const QlcInputLaw& law, const SourceConfig& src = {});

// Seven-constraint multi-letter region for given causal policies,
// normalized per channel use.
RatePolytope multiletter_region(const TableChannel& channel,
                                const std::array<CausalPolicy, 3>& policies, int horizon,
                                std::uint64_t cap = kTrajectoryCap);

}  // namespace macfb

#endif  // MACFB_REGION_HPP
