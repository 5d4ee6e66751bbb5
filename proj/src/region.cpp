#include "macfb/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace macfb {

namespace {

// even_index[v1 | v2<<1 | v3<<2] -> triple index, -1 on odd parity
constexpr int kEvenIndex[8] = {0, -1, -1, 3, -1, 2, 1, -1};

int coupled_v_index(int t1, int t2, int t3) {
    const int v1 = t2 ^ t3, v2 = t1 ^ t3, v3 = t1 ^ t2;
    return kEvenIndex[v1 | (v2 << 1) | (v3 << 2)];
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

double RatePolytope::diagonal_boundary() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : constraints) {
        const double s = c.coeff[0] + c.coeff[1] + c.coeff[2];
        if (s > 0) best = std::min(best, c.bound / s);
    }
    return best;
}

nlohmann::json RatePolytope::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : constraints) {
        nlohmann::json jc{{"name", c.name},
                          {"family", c.family},
                          {"coeff", c.coeff},
                          {"bound", c.bound}};
        if (!c.terms.empty()) {
            jc["terms"] = c.terms;
            jc["term_names"] = c.term_names;
        }
        arr.push_back(std::move(jc));
    }
    return {{"constraints", arr}, {"diagonal_boundary", diagonal_boundary()}};
}

std::string RatePolytope::diagonal_csv() const {
    std::ostringstream out;
    out << "name,family,c1,c2,c3,bound,diagonal_intercept\n";
    for (const auto& c : constraints) {
        const double s = c.coeff[0] + c.coeff[1] + c.coeff[2];
        const double t = s > 0 ? c.bound / s : std::numeric_limits<double>::infinity();
        out << c.name << ',' << c.family << ',' << format_double(c.coeff[0]) << ','
            << format_double(c.coeff[1]) << ',' << format_double(c.coeff[2]) << ','
            << format_double(c.bound) << ',' << format_double(t) << '\n';
    }
    out << "diagonal,boundary,1,1,1," << format_double(3 * diagonal_boundary()) << ','
        << format_double(diagonal_boundary()) << '\n';
    return out.str();
}

ContainsResult polytope_contains(const RatePolytope& poly, const std::array<double, 3>& point,
                                 double tol) {
    ContainsResult res;
    res.inside = true;
    res.min_slack = std::numeric_limits<double>::infinity();
    for (const auto& c : poly.constraints) {
        const double lhs =
            c.coeff[0] * point[0] + c.coeff[1] * point[1] + c.coeff[2] * point[2];
        const double slack = c.bound - lhs;
        res.slacks.push_back(slack);
        if (slack < res.min_slack) {
            res.min_slack = slack;
            res.tightest = c.name;
        }
        if (slack < -tol) res.inside = false;
    }
    return res;
}

std::array<double, 3> corner_point(double delta) {
    if (!(delta >= 0.0 && delta <= 0.5))
        throw validation_error("delta must be in [0, 0.5]");
    const double r = 1.0 - binary_entropy(delta);
    return {r, r, r};
}

double state_mismatch_fraction_bound(double eps, double c, double delta) {
    if (!(eps >= 0.0)) throw validation_error("eps must be nonnegative");
    if (!(c > 0.0)) throw validation_error("threshold c must be positive");
    if (!(delta >= 0.0 && delta < 0.5))
        throw validation_error("delta must be in [0, 0.5)");
    return 3.0 * eps / (2.0 * c * (1.0 - binary_entropy(delta)));
}

double SourceConfig::ratio(int i, int j) const {
    validate();
    const double bi = w_bias[static_cast<std::size_t>(i)];
    const double bj = w_bias[static_cast<std::size_t>(j)];
    const double bxor = bi * (1.0 - bj) + bj * (1.0 - bi);
    return (binary_entropy(bi) + binary_entropy(bj)) / binary_entropy(bxor);
}

void SourceConfig::validate() const {
    for (double b : w_bias)
        if (!(b > 0.0 && b < 1.0))
            throw validation_error("source biases must lie strictly inside (0, 1)");
}

double QlcInputLaw::x_prob(int user, int u, int t, int v, int x) const {
    const auto& table = x_given[static_cast<std::size_t>(user)];
    const std::size_t row = (static_cast<std::size_t>(u) * 2 + static_cast<std::size_t>(t)) * 2 +
                            static_cast<std::size_t>(v);
    return table[row * static_cast<std::size_t>(x_size(user)) + static_cast<std::size_t>(x)];
}

void QlcInputLaw::validate() const {
    channel.validate();
    if (p_u.empty() || u_size() > kMaxUSize)
        throw validation_error("|U| must be between 1 and 4");
    double su = 0;
    for (double p : p_u) {
        if (!(p >= 0.0)) throw validation_error("p(u) entries must be nonnegative");
        su += p;
    }
    if (std::abs(su - 1.0) > 1e-9) throw validation_error("p(u) must sum to 1");
    for (int i = 0; i < 3; ++i) {
        const std::size_t rows = static_cast<std::size_t>(u_size()) * 4;
        if (x_given[static_cast<std::size_t>(i)].size() !=
            rows * static_cast<std::size_t>(x_size(i)))
            throw validation_error("conditional table size mismatch for user " +
                                   std::to_string(i + 1));
        for (int u = 0; u < u_size(); ++u)
            for (int t = 0; t < 2; ++t)
                for (int v = 0; v < 2; ++v) {
                    double s = 0;
                    for (int x = 0; x < x_size(i); ++x) {
                        const double p = x_prob(i, u, t, v, x);
                        if (!(p >= 0.0))
                            throw validation_error("conditional entries must be nonnegative");
                        s += p;
                    }
                    if (std::abs(s - 1.0) > 1e-9)
                        throw validation_error("conditional row must sum to 1");
                }
    }
    double sv = 0;
    for (double p : v_law) {
        if (!(p >= 0.0)) throw validation_error("v law entries must be nonnegative");
        sv += p;
    }
    if (std::abs(sv - 1.0) > 1e-9) throw validation_error("v law must sum to 1");
    // Pairwise independence with uniform marginals over the even-parity support.
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    double p = 0;
                    for (int idx = 0; idx < 4; ++idx)
                        if (kEvenParityTriples[static_cast<std::size_t>(idx)]
                                              [static_cast<std::size_t>(i)] == a &&
                            kEvenParityTriples[static_cast<std::size_t>(idx)]
                                              [static_cast<std::size_t>(j)] == b)
                            p += v_law[static_cast<std::size_t>(idx)];
                    if (std::abs(p - 0.25) > 1e-9)
                        throw validation_error("v law must make V pairwise independent uniform");
                }
}

QlcInputLaw QlcInputLaw::bit_pair_default(TableChannel channel, int u_size) {
    QlcInputLaw law;
    law.channel = std::move(channel);
    law.p_u.assign(static_cast<std::size_t>(u_size), 1.0 / u_size);
    for (int i = 0; i < 3; ++i) {
        if (law.channel.input_sizes[static_cast<std::size_t>(i)] != 4)
            throw validation_error("bit-pair law needs 4-symbol input alphabets");
        auto& table = law.x_given[static_cast<std::size_t>(i)];
        table.assign(static_cast<std::size_t>(u_size) * 4 * 4, 0.0);
        for (int u = 0; u < u_size; ++u)
            for (int t = 0; t < 2; ++t)
                for (int v = 0; v < 2; ++v) {
                    const std::size_t row =
                        (static_cast<std::size_t>(u) * 2 + static_cast<std::size_t>(t)) * 2 +
                        static_cast<std::size_t>(v);
                    table[row * 4 + static_cast<std::size_t>(t | (v << 1))] = 1.0;
                }
    }
    law.validate();
    return law;
}

QlcInputLaw QlcInputLaw::from_json(const nlohmann::json& j) {
    QlcInputLaw law;
    law.channel = TableChannel::from_json(j.at("channel"));
    if (j.contains("p_u")) law.p_u = j.at("p_u").get<std::vector<double>>();
    if (j.value("x_given_mode", std::string("tables")) == "bit_pair")
        return bit_pair_default(law.channel, j.value("u_size", 2));
    const auto& tables = j.at("x_given");
    if (!tables.is_array() || tables.size() != 3)
        throw validation_error("x_given needs one table per user");
    for (int i = 0; i < 3; ++i)
        law.x_given[static_cast<std::size_t>(i)] = tables[i].get<std::vector<double>>();
    if (j.contains("v_mode"))
        law.v_mode = j.at("v_mode").get<std::string>() == "independent" ? VMode::independent
                                                                        : VMode::coupled;
    if (j.contains("v_law")) {
        const auto v = j.at("v_law").get<std::vector<double>>();
        if (v.size() != 4) throw validation_error("v law needs four entries");
        std::copy(v.begin(), v.end(), law.v_law.begin());
    }
    law.validate();
    return law;
}

nlohmann::json QlcInputLaw::to_json() const {
    return {{"channel", channel.to_json()},
            {"p_u", p_u},
            {"x_given", x_given},
            {"v_mode", v_mode == VMode::coupled ? "coupled" : "independent"},
            {"v_law", v_law}};
}

std::string rvar_name(RVar v) {
    switch (v) {
        case RVar::TildeU: return "U~";
        case RVar::TildeT1: return "T1~";
        case RVar::TildeT2: return "T2~";
        case RVar::TildeT3: return "T3~";
        case RVar::TildeVIdx: return "V~";
        case RVar::TildeX1: return "X1~";
        case RVar::TildeX2: return "X2~";
        case RVar::TildeX3: return "X3~";
        case RVar::TildeY: return "Y~";
        case RVar::V1: return "V1";
        case RVar::V2: return "V2";
        case RVar::V3: return "V3";
        case RVar::U: return "U";
        case RVar::T1: return "T1";
        case RVar::T2: return "T2";
        case RVar::T3: return "T3";
        case RVar::X1: return "X1";
        case RVar::X2: return "X2";
        case RVar::X3: return "X3";
        case RVar::Y: return "Y";
        case RVar::TSum12: return "T1+T2";
        case RVar::TSum13: return "T1+T3";
        case RVar::TSum23: return "T2+T3";
    }
    throw validation_error("unknown two-block variable");
}

JointPmf single_block_joint(const QlcInputLaw& law) {
    law.validate();
    const int nu = law.u_size();
    std::vector<Axis> axes{{"U", nu},  {"T1", 2}, {"T2", 2}, {"T3", 2}, {"V", 4},
                           {"X1", law.x_size(0)}, {"X2", law.x_size(1)},
                           {"X3", law.x_size(2)}, {"Y", law.channel.output_size}};
    // "V" is the block's own V triple index over the even-parity support.
    JointPmf out = JointPmf::zeros(axes);
    std::size_t idx = 0;
    for (int u = 0; u < nu; ++u)
        for (int t1 = 0; t1 < 2; ++t1)
            for (int t2 = 0; t2 < 2; ++t2)
                for (int t3 = 0; t3 < 2; ++t3)
                    for (int vi = 0; vi < 4; ++vi) {
                        const auto& vt = kEvenParityTriples[static_cast<std::size_t>(vi)];
                        const double base = law.p_u[static_cast<std::size_t>(u)] * 0.125 *
                                            law.v_law[static_cast<std::size_t>(vi)];
                        for (int x1 = 0; x1 < law.x_size(0); ++x1)
                            for (int x2 = 0; x2 < law.x_size(1); ++x2)
                                for (int x3 = 0; x3 < law.x_size(2); ++x3) {
                                    const double px = base *
                                                      law.x_prob(0, u, t1, vt[0], x1) *
                                                      law.x_prob(1, u, t2, vt[1], x2) *
                                                      law.x_prob(2, u, t3, vt[2], x3);
                                    for (int y = 0; y < law.channel.output_size; ++y, ++idx)
                                        out.data()[idx] = px * law.channel.prob(x1, x2, x3, y);
                                }
                    }
    return out;
}

namespace {

struct VarSpec {
    RVar var;
    int size;
};

int rvar_size(const QlcInputLaw& law, RVar v) {
    switch (v) {
        case RVar::TildeU:
        case RVar::U: return law.u_size();
        case RVar::TildeVIdx: return 4;
        case RVar::TildeX1:
        case RVar::X1: return law.x_size(0);
        case RVar::TildeX2:
        case RVar::X2: return law.x_size(1);
        case RVar::TildeX3:
        case RVar::X3: return law.x_size(2);
        case RVar::TildeY:
        case RVar::Y: return law.channel.output_size;
        default: return 2;
    }
}

bool is_tilde(RVar v) { return v <= RVar::TildeY; }
bool is_current_v(RVar v) { return v == RVar::V1 || v == RVar::V2 || v == RVar::V3; }

}  // namespace

JointPmf two_block_marginal(const QlcInputLaw& law, const std::vector<RVar>& vars) {
    law.validate();
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            if (vars[i] == vars[j]) throw validation_error("duplicate two-block variable");

    // Canonical output order: enum order.
    std::vector<RVar> ordered = vars;
    std::sort(ordered.begin(), ordered.end());

    std::vector<RVar> tilde_vars, cur_vars, v_vars;
    for (RVar v : ordered) {
        if (is_tilde(v))
            tilde_vars.push_back(v);
        else if (is_current_v(v))
            v_vars.push_back(v);
        else
            cur_vars.push_back(v);
    }

    // --- Current-block table per coupling value: q[vidx] over cur_vars. ---
    std::size_t cur_size = 1;
    for (RVar v : cur_vars) cur_size *= static_cast<std::size_t>(rvar_size(law, v));
    std::array<std::vector<double>, 4> q;
    for (auto& t : q) t.assign(cur_size, 0.0);

    const int nu = law.u_size();
    for (int vi = 0; vi < 4; ++vi) {
        const auto& vt = kEvenParityTriples[static_cast<std::size_t>(vi)];
        for (int u = 0; u < nu; ++u)
            for (int t1 = 0; t1 < 2; ++t1)
                for (int t2 = 0; t2 < 2; ++t2)
                    for (int t3 = 0; t3 < 2; ++t3) {
                        const double pt = law.p_u[static_cast<std::size_t>(u)] * 0.125;
                        for (int x1 = 0; x1 < law.x_size(0); ++x1)
                            for (int x2 = 0; x2 < law.x_size(1); ++x2)
                                for (int x3 = 0; x3 < law.x_size(2); ++x3) {
                                    const double px = pt *
                                                      law.x_prob(0, u, t1, vt[0], x1) *
                                                      law.x_prob(1, u, t2, vt[1], x2) *
                                                      law.x_prob(2, u, t3, vt[2], x3);
                                    if (px == 0.0) continue;
                                    for (int y = 0; y < law.channel.output_size; ++y) {
                                        const double p = px * law.channel.prob(x1, x2, x3, y);
                                        if (p == 0.0) continue;
                                        std::size_t ci = 0;
                                        for (RVar v : cur_vars) {
                                            int val = 0;
                                            switch (v) {
                                                case RVar::U: val = u; break;
                                                case RVar::T1: val = t1; break;
                                                case RVar::T2: val = t2; break;
                                                case RVar::T3: val = t3; break;
                                                case RVar::X1: val = x1; break;
                                                case RVar::X2: val = x2; break;
                                                case RVar::X3: val = x3; break;
                                                case RVar::Y: val = y; break;
                                                case RVar::TSum12: val = t1 ^ t2; break;
                                                case RVar::TSum13: val = t1 ^ t3; break;
                                                case RVar::TSum23: val = t2 ^ t3; break;
                                                default: break;
                                            }
                                            ci = ci * static_cast<std::size_t>(
                                                          rvar_size(law, v)) +
                                                 static_cast<std::size_t>(val);
                                        }
                                        q[static_cast<std::size_t>(vi)][ci] += p;
                                    }
                                }
                    }
    }

    // --- Tilde-block table over (tilde_vars, coupling vidx). ---
    std::size_t tilde_size = 1;
    for (RVar v : tilde_vars) tilde_size *= static_cast<std::size_t>(rvar_size(law, v));
    std::vector<double> tm(tilde_size * 4, 0.0);

    for (int u = 0; u < nu; ++u)
        for (int t1 = 0; t1 < 2; ++t1)
            for (int t2 = 0; t2 < 2; ++t2)
                for (int t3 = 0; t3 < 2; ++t3)
                    for (int vi = 0; vi < 4; ++vi) {
                        const auto& vt = kEvenParityTriples[static_cast<std::size_t>(vi)];
                        const double base = law.p_u[static_cast<std::size_t>(u)] * 0.125 *
                                            law.v_law[static_cast<std::size_t>(vi)];
                        if (base == 0.0) continue;
                        for (int x1 = 0; x1 < law.x_size(0); ++x1)
                            for (int x2 = 0; x2 < law.x_size(1); ++x2)
                                for (int x3 = 0; x3 < law.x_size(2); ++x3) {
                                    const double px = base *
                                                      law.x_prob(0, u, t1, vt[0], x1) *
                                                      law.x_prob(1, u, t2, vt[1], x2) *
                                                      law.x_prob(2, u, t3, vt[2], x3);
                                    if (px == 0.0) continue;
                                    for (int y = 0; y < law.channel.output_size; ++y) {
                                        const double p = px * law.channel.prob(x1, x2, x3, y);
                                        if (p == 0.0) continue;
                                        std::size_t ti = 0;
                                        for (RVar v : tilde_vars) {
                                            int val = 0;
                                            switch (v) {
                                                case RVar::TildeU: val = u; break;
                                                case RVar::TildeT1: val = t1; break;
                                                case RVar::TildeT2: val = t2; break;
                                                case RVar::TildeT3: val = t3; break;
                                                case RVar::TildeVIdx: val = vi; break;
                                                case RVar::TildeX1: val = x1; break;
                                                case RVar::TildeX2: val = x2; break;
                                                case RVar::TildeX3: val = x3; break;
                                                case RVar::TildeY: val = y; break;
                                                default: break;
                                            }
                                            ti = ti * static_cast<std::size_t>(
                                                          rvar_size(law, v)) +
                                                 static_cast<std::size_t>(val);
                                        }
                                        if (law.v_mode == VMode::coupled) {
                                            const int vc = coupled_v_index(t1, t2, t3);
                                            tm[ti * 4 + static_cast<std::size_t>(vc)] += p;
                                        } else {
                                            for (int vc = 0; vc < 4; ++vc)
                                                tm[ti * 4 + static_cast<std::size_t>(vc)] +=
                                                    p * law.v_law[static_cast<std::size_t>(vc)];
                                        }
                                    }
                                }
                    }

    // --- Combine into the requested marginal. ---
    std::vector<Axis> axes;
    for (RVar v : ordered) axes.push_back({rvar_name(v), rvar_size(law, v)});
    JointPmf out = JointPmf::zeros(axes);

    std::vector<std::size_t> tilde_pos, v_pos, cur_pos;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (is_tilde(ordered[i]))
            tilde_pos.push_back(i);
        else if (is_current_v(ordered[i]))
            v_pos.push_back(i);
        else
            cur_pos.push_back(i);
    }

    std::vector<int> coords(ordered.size(), 0);
    std::vector<int> tilde_coords(tilde_vars.size(), 0);
    std::vector<int> cur_coords(cur_vars.size(), 0);
    for (std::size_t ti = 0; ti < tilde_size; ++ti) {
        {
            std::size_t rem = ti;
            for (std::size_t j = tilde_vars.size(); j-- > 0;) {
                const int sz = rvar_size(law, tilde_vars[j]);
                tilde_coords[j] = static_cast<int>(rem % static_cast<std::size_t>(sz));
                rem /= static_cast<std::size_t>(sz);
            }
        }
        for (int vc = 0; vc < 4; ++vc) {
            const double wt = tm[ti * 4 + static_cast<std::size_t>(vc)];
            if (wt == 0.0) continue;
            const auto& vt = kEvenParityTriples[static_cast<std::size_t>(vc)];
            for (std::size_t j = 0; j < tilde_pos.size(); ++j)
                coords[tilde_pos[j]] = tilde_coords[j];
            for (std::size_t j = 0; j < v_pos.size(); ++j) {
                const RVar v = ordered[v_pos[j]];
                const int m = v == RVar::V1 ? 0 : v == RVar::V2 ? 1 : 2;
                coords[v_pos[j]] = vt[static_cast<std::size_t>(m)];
            }
            const auto& qt = q[static_cast<std::size_t>(vc)];
            for (std::size_t ci = 0; ci < cur_size; ++ci) {
                const double wc = qt[ci];
                if (wc == 0.0) continue;
                std::size_t rem = ci;
                for (std::size_t j = cur_vars.size(); j-- > 0;) {
                    const int sz = rvar_size(law, cur_vars[j]);
                    cur_coords[j] = static_cast<int>(rem % static_cast<std::size_t>(sz));
                    rem /= static_cast<std::size_t>(sz);
                }
                for (std::size_t j = 0; j < cur_pos.size(); ++j)
                    coords[cur_pos[j]] = cur_coords[j];
                out.at(coords) += wt * wc;
            }
        }
    }
    return out;
}

namespace {

std::vector<std::string> names(const std::vector<RVar>& vars) {
    std::vector<std::string> out;
    for (RVar v : vars) out.push_back(rvar_name(v));
    return out;
}

std::vector<RVar> concat(std::vector<RVar> a, const std::vector<RVar>& b) {
    for (RVar v : b)
        if (std::find(a.begin(), a.end(), v) == a.end()) a.push_back(v);
    return a;
}

double term_mi(const QlcInputLaw& law, const std::vector<RVar>& subject,
               const std::vector<RVar>& object, const std::vector<RVar>& cond) {
    const auto all = concat(concat(subject, object), cond);
    const JointPmf m = two_block_marginal(law, all);
    return mutual_info(m, names(subject), names(object), names(cond));
}

constexpr RVar kCurX[3] = {RVar::X1, RVar::X2, RVar::X3};
constexpr RVar kCurT[3] = {RVar::T1, RVar::T2, RVar::T3};
constexpr RVar kCurV[3] = {RVar::V1, RVar::V2, RVar::V3};
constexpr RVar kTildeX[3] = {RVar::TildeX1, RVar::TildeX2, RVar::TildeX3};
constexpr RVar kTildeT[3] = {RVar::TildeT1, RVar::TildeT2, RVar::TildeT3};

RVar tsum(int i, int j) {
    const int lo = std::min(i, j), hi = std::max(i, j);
    if (lo == 0 && hi == 1) return RVar::TSum12;
    if (lo == 0 && hi == 2) return RVar::TSum13;
    return RVar::TSum23;
}

std::string subset_name(const std::vector<int>& users) {
    std::string s;
    for (int u : users) {
        if (!s.empty()) s += "+";
        s += "R" + std::to_string(u + 1);
    }
    return s;
}

}  // namespace

RatePolytope qlc_region(const QlcInputLaw& law, const SourceConfig& src) {
    law.validate();
    src.validate();
    RatePolytope poly;

    // Common second term of every subset bound.
    const double common = term_mi(law, {RVar::U}, {RVar::Y}, {RVar::TildeU, RVar::TildeY});

    for (int mask = 1; mask < 8; ++mask) {
        std::vector<int> in, out;
        for (int u = 0; u < 3; ++u) (mask >> u & 1 ? in : out).push_back(u);
        std::vector<RVar> subject, cond{RVar::U, RVar::TildeVIdx};
        for (int u : in) subject.push_back(kCurX[u]);
        for (int u : out) {
            cond.push_back(kCurX[u]);
            cond.push_back(kCurT[u]);
            cond.push_back(kCurV[u]);
        }
        RateConstraint c;
        for (int u : in) c.coeff[static_cast<std::size_t>(u)] = 1.0;
        const double lead = term_mi(law, subject, {RVar::Y}, cond);
        c.bound = lead + common;
        c.name = subset_name(in);
        c.family = "subset";
        c.terms = {lead, common};
        c.term_names = {"I(X_A;Y|U S_Ac V~)", "I(U;Y|U~ Y~)"};
        poly.constraints.push_back(std::move(c));
    }

    for (int k = 2; k >= 0; --k) {
        const int i = k == 0 ? 1 : 0;
        const int j = k == 2 ? 1 : 2;
        const double t1 =
            term_mi(law, {tsum(i, j)}, {RVar::Y},
                    {RVar::U, kCurT[k], kCurX[k], RVar::TildeVIdx});
        const double t2 = term_mi(law, {kTildeX[i], kTildeX[j]}, {RVar::TildeY},
                                  {RVar::TildeU, kTildeX[k], kTildeT[k], RVar::TildeVIdx,
                                   kCurV[k]});
        const double t3 = term_mi(law, {kTildeX[i], kTildeX[j]}, {RVar::Y},
                                  {RVar::TildeU, kTildeX[k], kTildeT[k], RVar::TildeVIdx,
                                   RVar::U, kCurX[k], kCurT[k], kCurV[k], RVar::TildeY});
        RateConstraint c;
        c.coeff[static_cast<std::size_t>(i)] = 1.0;
        c.coeff[static_cast<std::size_t>(j)] = 1.0;
        c.bound = t1 + t2 + t3;
        c.name = subset_name({i, j});
        c.family = "pair-decode";
        c.terms = {t1, t2, t3};
        c.term_names = {"I(Ti+Tj;Y|U Tk Xk V~)", "I(Xi~ Xj~;Y~|U~ Sk~ V~ Vk)",
                        "I(Xi~ Xj~;Y|U~ Sk~ V~ U Sk Y~)"};
        poly.constraints.push_back(std::move(c));
    }

    for (int k = 2; k >= 0; --k) {
        const int i = k == 0 ? 1 : 0;
        const int j = k == 2 ? 1 : 2;
        const double t =
            term_mi(law, {tsum(i, j)}, {RVar::Y}, {RVar::U, kCurT[k], kCurX[k]});
        RateConstraint c;
        c.coeff[static_cast<std::size_t>(i)] = 1.0;
        c.coeff[static_cast<std::size_t>(j)] = 1.0;
        c.bound = src.ratio(i, j) * t;
        c.name = subset_name({i, j});
        c.family = "pair-ratio";
        c.terms = {t};
        c.term_names = {"I(Ti+Tj;Y|U Tk Xk)"};
        poly.constraints.push_back(std::move(c));
    }
    return poly;
}

RatePolytope cl_region(const QlcInputLaw& law, const SourceConfig& src) {
    law.validate();
    src.validate();

    JointPmf p = single_block_joint(law);
    p = p.with_derived_axis("T1+T2", 2, {"T1", "T2"},
                            [](std::span<const int> v) { return v[0] ^ v[1]; });
    p = p.with_derived_axis("T1+T3", 2, {"T1", "T3"},
                            [](std::span<const int> v) { return v[0] ^ v[1]; });
    p = p.with_derived_axis("T2+T3", 2, {"T2", "T3"},
                            [](std::span<const int> v) { return v[0] ^ v[1]; });

    const std::string xs[3] = {"X1", "X2", "X3"};
    const std::string ts[3] = {"T1", "T2", "T3"};
    const std::string sums[3][3] = {{"", "T1+T2", "T1+T3"},
                                    {"T1+T2", "", "T2+T3"},
                                    {"T1+T3", "T2+T3", ""}};

    RatePolytope poly;
    const double common = mutual_info(p, {"U"}, {"Y"});

    for (int mask = 1; mask < 8; ++mask) {
        std::vector<int> in, out;
        for (int u = 0; u < 3; ++u) (mask >> u & 1 ? in : out).push_back(u);
        std::vector<std::string> subject, cond{"U"};
        for (int u : in) subject.push_back(xs[u]);
        for (int u : out) {
            cond.push_back(xs[u]);
            cond.push_back(ts[u]);
        }
        RateConstraint c;
        for (int u : in) c.coeff[static_cast<std::size_t>(u)] = 1.0;
        const double lead = mutual_info(p, subject, {"Y"}, cond);
        c.bound = lead + common;
        c.name = subset_name(in);
        c.family = "subset";
        c.terms = {lead, common};
        c.term_names = {"I(X_A;Y|U S_Ac V~)", "I(U;Y|U~ Y~)"};
        poly.constraints.push_back(std::move(c));
    }

    for (int k = 2; k >= 0; --k) {
        const int i = k == 0 ? 1 : 0;
        const int j = k == 2 ? 1 : 2;
        const std::string& sum = sums[i][j];
        const double t1 = mutual_info(p, {sum}, {"Y"}, {"U", ts[k], xs[k]});
        const double t2 = mutual_info(p, {xs[i], xs[j]}, {"Y"}, {"U", xs[k], ts[k], sum});
        RateConstraint c;
        c.coeff[static_cast<std::size_t>(i)] = 1.0;
        c.coeff[static_cast<std::size_t>(j)] = 1.0;
        c.bound = t1 + t2;
        c.name = subset_name({i, j});
        c.family = "pair-decode";
        c.terms = {t1, t2, 0.0};
        c.term_names = {"I(Ti+Tj;Y|U Tk Xk V~)", "I(Xi~ Xj~;Y~|U~ Sk~ V~ Vk)",
                        "I(Xi~ Xj~;Y|U~ Sk~ V~ U Sk Y~)"};
        poly.constraints.push_back(std::move(c));
    }

    for (int k = 2; k >= 0; --k) {
        const int i = k == 0 ? 1 : 0;
        const int j = k == 2 ? 1 : 2;
        const double t = mutual_info(p, {sums[i][j]}, {"Y"}, {"U", ts[k], xs[k]});
        RateConstraint c;
        c.coeff[static_cast<std::size_t>(i)] = 1.0;
        c.coeff[static_cast<std::size_t>(j)] = 1.0;
        c.bound = src.ratio(i, j) * t;
        c.name = subset_name({i, j});
        c.family = "pair-ratio";
        c.terms = {t};
        c.term_names = {"I(Ti+Tj;Y|U Tk Xk)"};
        poly.constraints.push_back(std::move(c));
    }
    return poly;
}

RatePolytope multiletter_region(const TableChannel& channel,
                                const std::array<CausalPolicy, 3>& policies, int horizon,
                                std::uint64_t cap) {
    TrajectoryLaw law(channel, policies, horizon, cap);
    const double n = horizon;

    const int all[3] = {0, 1, 2};
    const double h_all = law.causally_conditioned_entropy(all);
    const double h_y = law.output_entropy();
    double h_single[3];
    double h_pair[3];  // h_pair[k] conditions on user k alone
    for (int u = 0; u < 3; ++u) {
        const int one[1] = {u};
        h_single[u] = law.causally_conditioned_entropy(one);
    }
    for (int k = 0; k < 3; ++k) {
        const int i = k == 0 ? 1 : 0;
        const int j = k == 2 ? 1 : 2;
        const int pair[2] = {std::min(i, j), std::max(i, j)};
        h_pair[k] = law.causally_conditioned_entropy(pair);
    }

    RatePolytope poly;
    for (int u = 0; u < 3; ++u) {
        RateConstraint c;
        c.coeff[static_cast<std::size_t>(u)] = 1.0;
        c.bound = (h_pair[u] - h_all) / n;  // I(X_u -> Y || X_j X_k) / L
        c.name = subset_name({u});
        c.family = "directed-single";
        poly.constraints.push_back(std::move(c));
    }
    for (int k = 2; k >= 0; --k) {
        const int i = k == 0 ? 1 : 0;
        const int j = k == 2 ? 1 : 2;
        RateConstraint c;
        c.coeff[static_cast<std::size_t>(i)] = 1.0;
        c.coeff[static_cast<std::size_t>(j)] = 1.0;
        c.bound = (h_single[k] - h_all) / n;
        c.name = subset_name({i, j});
        c.family = "directed-pair";
        poly.constraints.push_back(std::move(c));
    }
    {
        RateConstraint c;
        c.coeff = {1.0, 1.0, 1.0};
        c.bound = (h_y - h_all) / n;
        c.name = "R1+R2+R3";
        c.family = "directed-sum";
        poly.constraints.push_back(std::move(c));
    }
    return poly;
}

}  // namespace macfb
