#include "macfb/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace macfb {

CausalPolicy CausalPolicy::iid(std::vector<double> marginal, int horizon, int output_size) {
    CausalPolicy p;
    p.input_size = static_cast<int>(marginal.size());
    p.output_size = output_size;
    p.horizon = horizon;
    p.tables.assign(static_cast<std::size_t>(horizon), marginal);
    p.validate();
    return p;
}

CausalPolicy CausalPolicy::uniform(int input_size, int horizon, int output_size) {
    return iid(std::vector<double>(static_cast<std::size_t>(input_size),
                                   1.0 / static_cast<double>(input_size)),
               horizon, output_size);
}

std::size_t CausalPolicy::row_count(int stage) const {
    std::size_t rows = 1;
    for (int t = 1; t < stage; ++t) {
        if (uses_own_history) rows *= static_cast<std::size_t>(input_size);
        if (uses_feedback) rows *= static_cast<std::size_t>(output_size);
    }
    return rows;
}

double CausalPolicy::prob(int stage, std::span<const int> own_hist, std::span<const int> y_hist,
                          int x) const {
    std::size_t row = 0;
    if (uses_own_history)
        for (int t = 0; t < stage - 1; ++t)
            row = row * static_cast<std::size_t>(input_size) +
                  static_cast<std::size_t>(own_hist[t]);
    if (uses_feedback)
        for (int t = 0; t < stage - 1; ++t)
            row = row * static_cast<std::size_t>(output_size) +
                  static_cast<std::size_t>(y_hist[t]);
    return tables[static_cast<std::size_t>(stage - 1)]
                 [row * static_cast<std::size_t>(input_size) + static_cast<std::size_t>(x)];
}

void CausalPolicy::validate(double tol) const {
    if (input_size < 1 || output_size < 1 || horizon < 1)
        throw validation_error("policy dimensions must be positive");
    if (tables.size() != static_cast<std::size_t>(horizon))
        throw validation_error("policy needs one table per stage");
    for (int l = 1; l <= horizon; ++l) {
        const auto& table = tables[static_cast<std::size_t>(l - 1)];
        const std::size_t rows = row_count(l);
        if (table.size() != rows * static_cast<std::size_t>(input_size))
            throw validation_error("policy table size mismatch at stage " + std::to_string(l));
        for (std::size_t r = 0; r < rows; ++r) {
            double s = 0;
            for (int x = 0; x < input_size; ++x) {
                const double p = table[r * static_cast<std::size_t>(input_size) +
                                       static_cast<std::size_t>(x)];
                if (!(p >= 0.0)) throw validation_error("policy probabilities must be >= 0");
                s += p;
            }
            if (std::abs(s - 1.0) > tol)
                throw validation_error("policy row does not sum to 1");
        }
    }
}

CausalPolicy CausalPolicy::from_json(const nlohmann::json& j) {
    const auto kind = j.value("kind", std::string("tables"));
    const int horizon = j.at("horizon").get<int>();
    const int output_size = j.at("output_size").get<int>();
    if (kind == "iid")
        return iid(j.at("marginal").get<std::vector<double>>(), horizon, output_size);
    if (kind == "uniform")
        return uniform(j.at("input_size").get<int>(), horizon, output_size);
    if (kind != "tables") throw validation_error("unknown policy kind '" + kind + "'");
    CausalPolicy p;
    p.input_size = j.at("input_size").get<int>();
    p.output_size = output_size;
    p.horizon = horizon;
    p.uses_own_history = j.value("uses_own_history", false);
    p.uses_feedback = j.value("uses_feedback", false);
    p.tables = j.at("tables").get<std::vector<std::vector<double>>>();
    p.validate();
    return p;
}

nlohmann::json CausalPolicy::to_json() const {
    return {{"kind", "tables"},
            {"input_size", input_size},
            {"output_size", output_size},
            {"horizon", horizon},
            {"uses_own_history", uses_own_history},
            {"uses_feedback", uses_feedback},
            {"tables", tables}};
}

std::string traj_axis_name(const TrajAxis& a) {
    if (a.var == kOutputVar) return "Y@" + std::to_string(a.time);
    return "X" + std::to_string(a.var + 1) + "@" + std::to_string(a.time);
}

TrajectoryLaw::TrajectoryLaw(TableChannel channel, std::array<CausalPolicy, 3> policies,
                             int horizon, std::uint64_t cap)
    : channel_(std::move(channel)), policies_(std::move(policies)), horizon_(horizon),
      cap_(cap) {
    channel_.validate();
    if (horizon_ < 1) throw validation_error("horizon must be at least 1");
    for (int i = 0; i < 3; ++i) {
        policies_[i].validate();
        if (policies_[i].input_size != channel_.input_sizes[i])
            throw validation_error("policy input alphabet does not match channel");
        if (policies_[i].output_size != channel_.output_size)
            throw validation_error("policy output alphabet does not match channel");
        if (policies_[i].horizon < horizon_)
            throw validation_error("policy horizon shorter than trajectory horizon");
    }
}

namespace {

struct ForwardState {
    std::vector<TrajAxis> axes;
    std::vector<int> sizes;
    std::vector<double> probs{1.0};

    std::size_t size() const { return probs.size(); }
};

// Positions (in state axes) of one variable's history up to `stage`-1,
// time-ascending. Missing axes mean the policy never needed them.
std::vector<std::size_t> history_positions(const ForwardState& st, int var, int stage) {
    std::vector<std::size_t> pos;
    for (int t = 1; t < stage; ++t)
        for (std::size_t i = 0; i < st.axes.size(); ++i)
            if (st.axes[i].var == var && st.axes[i].time == t) pos.push_back(i);
    return pos;
}

}  // namespace

JointPmf TrajectoryLaw::marginal(std::vector<TrajAxis> request) const {
    for (const auto& a : request) {
        if (a.time < 1 || a.time > horizon_ || a.var < 0 || a.var > kOutputVar)
            throw validation_error("requested axis outside trajectory");
        if (std::count(request.begin(), request.end(), a) != 1)
            throw validation_error("duplicate requested axis");
    }

    const bool any_feedback = policies_[0].uses_feedback || policies_[1].uses_feedback ||
                              policies_[2].uses_feedback;
    auto requested = [&](int var, int time) {
        return std::find(request.begin(), request.end(), TrajAxis{var, time}) != request.end();
    };
    // Whether an axis must survive past the end of stage `l`.
    auto needed_after = [&](int var, int time, int l) {
        if (l >= horizon_) return false;
        if (var == kOutputVar) return any_feedback;
        return policies_[static_cast<std::size_t>(var)].uses_own_history;
    };

    const int sizes_in[4] = {channel_.input_sizes[0], channel_.input_sizes[1],
                             channel_.input_sizes[2], channel_.output_size};

    // Target tensor, axes in request order.
    std::vector<Axis> target_axes;
    std::uint64_t target_size = 1;
    for (const auto& a : request) {
        target_axes.push_back({traj_axis_name(a), sizes_in[a.var]});
        target_size *= static_cast<std::uint64_t>(sizes_in[a.var]);
        if (target_size > cap_) throw resource_limit_error("trajectory marginal exceeds cap");
    }
    JointPmf target = JointPmf::zeros(target_axes);

    ForwardState st;
    std::vector<int> coords;
    std::vector<int> hist_buf;
    for (int l = 1; l <= horizon_; ++l) {
        const auto x1p = history_positions(st, 0, l);
        const auto x2p = history_positions(st, 1, l);
        const auto x3p = history_positions(st, 2, l);
        const auto yp = history_positions(st, kOutputVar, l);
        const std::size_t* own_pos[3] = {x1p.data(), x2p.data(), x3p.data()};

        const std::size_t ext =
            static_cast<std::size_t>(sizes_in[0]) * static_cast<std::size_t>(sizes_in[1]) *
            static_cast<std::size_t>(sizes_in[2]) * static_cast<std::size_t>(sizes_in[3]);
        const bool last = l == horizon_;
        if (!last && static_cast<std::uint64_t>(st.size()) * ext > cap_)
            throw resource_limit_error("trajectory forward state exceeds cap");

        ForwardState next;
        if (!last) {
            next.axes = st.axes;
            for (int v = 0; v <= kOutputVar; ++v) next.axes.push_back({v, l});
            next.sizes = st.sizes;
            for (int v = 0; v <= kOutputVar; ++v) next.sizes.push_back(sizes_in[v]);
            next.probs.assign(st.size() * ext, 0.0);
        }

        // Map the four new axes (and surviving state axes) into the target.
        std::vector<std::size_t> target_stride_state(st.axes.size(), 0);
        std::size_t target_stride_new[4] = {0, 0, 0, 0};
        if (last) {
            std::vector<std::size_t> strides(request.size());
            std::size_t s = 1;
            for (std::size_t j = request.size(); j-- > 0;) {
                strides[j] = s;
                s *= static_cast<std::size_t>(sizes_in[request[j].var]);
            }
            for (std::size_t j = 0; j < request.size(); ++j) {
                const auto& a = request[j];
                if (a.time == l) {
                    target_stride_new[a.var] = strides[j];
                    continue;
                }
                bool found = false;
                for (std::size_t i = 0; i < st.axes.size(); ++i)
                    if (st.axes[i] == a) {
                        target_stride_state[i] = strides[j];
                        found = true;
                    }
                if (!found) throw validation_error("requested axis lost in forward pass");
            }
        }

        for (int u = 0; u < 3; ++u) {
            if (policies_[u].uses_own_history &&
                history_positions(st, u, l).size() != static_cast<std::size_t>(l - 1))
                throw resource_limit_error("internal: own history axis missing");
            if (policies_[u].uses_feedback && yp.size() != static_cast<std::size_t>(l - 1))
                throw resource_limit_error("internal: feedback history axis missing");
        }
        std::array<std::vector<double>, 3> prow;
        for (int u = 0; u < 3; ++u) prow[u].resize(static_cast<std::size_t>(sizes_in[u]));

        coords.assign(st.axes.size(), 0);
        for (std::size_t idx = 0; idx < st.size(); ++idx) {
            const double w = st.probs[idx];
            if (w != 0.0) {
                // Policy row lookups depend only on history coordinates.
                for (int u = 0; u < 3; ++u) {
                    hist_buf.clear();
                    if (policies_[u].uses_own_history)
                        for (std::size_t p = 0; p < static_cast<std::size_t>(l - 1); ++p)
                            hist_buf.push_back(coords[own_pos[u][p]]);
                    const std::size_t own_len = hist_buf.size();
                    if (policies_[u].uses_feedback)
                        for (std::size_t p = 0; p < yp.size(); ++p)
                            hist_buf.push_back(coords[yp[p]]);
                    for (int x = 0; x < sizes_in[u]; ++x)
                        prow[u][x] = policies_[u].prob(
                            l, {hist_buf.data(), own_len},
                            {hist_buf.data() + own_len, hist_buf.size() - own_len}, x);
                }
                std::size_t base_target = 0;
                if (last)
                    for (std::size_t i = 0; i < st.axes.size(); ++i)
                        base_target += target_stride_state[i] *
                                       static_cast<std::size_t>(coords[i]);

                std::size_t ext_idx = 0;
                for (int x1 = 0; x1 < sizes_in[0]; ++x1) {
                    const double w1 = w * prow[0][x1];
                    for (int x2 = 0; x2 < sizes_in[1]; ++x2) {
                        const double w2 = w1 * prow[1][x2];
                        for (int x3 = 0; x3 < sizes_in[2]; ++x3) {
                            const double w3 = w2 * prow[2][x3];
                            const auto row = channel_.row(x1, x2, x3);
                            for (int y = 0; y < sizes_in[3]; ++y, ++ext_idx) {
                                const double mass = w3 * row[y];
                                if (mass == 0.0) continue;
                                if (last) {
                                    target.data()[base_target +
                                                  target_stride_new[0] * x1 +
                                                  target_stride_new[1] * x2 +
                                                  target_stride_new[2] * x3 +
                                                  target_stride_new[3] * y] += mass;
                                } else {
                                    next.probs[idx * ext + ext_idx] += mass;
                                }
                            }
                        }
                    }
                }
            }
            for (std::size_t i = st.axes.size(); i-- > 0;) {
                if (++coords[i] < st.sizes[i]) break;
                coords[i] = 0;
            }
        }
        if (last) break;

        // Drop axes that neither the future factors nor the request need.
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < next.axes.size(); ++i) {
            const auto& a = next.axes[i];
            if (requested(a.var, a.time) || needed_after(a.var, a.time, l)) kept.push_back(i);
        }
        if (kept.size() != next.axes.size()) {
            ForwardState reduced;
            for (std::size_t i : kept) {
                reduced.axes.push_back(next.axes[i]);
                reduced.sizes.push_back(next.sizes[i]);
            }
            std::size_t reduced_size = 1;
            for (int s : reduced.sizes) reduced_size *= static_cast<std::size_t>(s);
            reduced.probs.assign(reduced_size, 0.0);

            std::vector<std::size_t> dst_stride(next.axes.size(), 0);
            {
                std::size_t s = 1;
                for (std::size_t j = kept.size(); j-- > 0;) {
                    dst_stride[kept[j]] = s;
                    s *= static_cast<std::size_t>(next.sizes[kept[j]]);
                }
            }
            std::vector<int> c(next.axes.size(), 0);
            std::size_t dst = 0;
            for (std::size_t src = 0; src < next.probs.size(); ++src) {
                reduced.probs[dst] += next.probs[src];
                for (std::size_t i = next.axes.size(); i-- > 0;) {
                    if (++c[i] < next.sizes[i]) {
                        dst += dst_stride[i];
                        break;
                    }
                    c[i] = 0;
                    dst -= dst_stride[i] * static_cast<std::size_t>(next.sizes[i] - 1);
                }
            }
            st = std::move(reduced);
        } else {
            st = std::move(next);
        }
    }
    return target;
}

JointPmf TrajectoryLaw::full_joint() const {
    std::vector<TrajAxis> all;
    for (int t = 1; t <= horizon_; ++t)
        for (int v = 0; v <= kOutputVar; ++v) all.push_back({v, t});
    return marginal(std::move(all));
}

double TrajectoryLaw::output_entropy() const {
    std::vector<TrajAxis> ys;
    for (int t = 1; t <= horizon_; ++t) ys.push_back({kOutputVar, t});
    const JointPmf p = marginal(std::move(ys));
    double h = 0;
    for (double v : p.probs())
        if (v > 0) h -= v * std::log2(v);
    return h;
}

double TrajectoryLaw::causally_conditioned_entropy(std::span<const int> users) const {
    for (int u : users)
        if (u < 0 || u > 2) throw validation_error("user index out of range");

    if (users.size() == 3) {
        // H(Y_k | Y^{k-1}, X^k) = E[H(channel row)] by memorylessness.
        double total = 0;
        for (int t = 1; t <= horizon_; ++t) {
            const JointPmf px = marginal({{0, t}, {1, t}, {2, t}});
            std::size_t idx = 0;
            for (int x1 = 0; x1 < channel_.input_sizes[0]; ++x1)
                for (int x2 = 0; x2 < channel_.input_sizes[1]; ++x2)
                    for (int x3 = 0; x3 < channel_.input_sizes[2]; ++x3, ++idx) {
                        const double p = px.probs()[idx];
                        if (p > 0) total += p * channel_.row_entropy(x1, x2, x3);
                    }
        }
        return total;
    }

    std::vector<TrajAxis> all;
    for (int t = 1; t <= horizon_; ++t) {
        for (int u : users) all.push_back({u, t});
        all.push_back({kOutputVar, t});
    }
    const JointPmf m = marginal(all);

    TimeGroups y_groups(static_cast<std::size_t>(horizon_));
    TimeGroups x_groups(static_cast<std::size_t>(horizon_));
    for (int t = 1; t <= horizon_; ++t) {
        y_groups[static_cast<std::size_t>(t - 1)] = {traj_axis_name({kOutputVar, t})};
        for (int u : users)
            x_groups[static_cast<std::size_t>(t - 1)].push_back(traj_axis_name({u, t}));
    }
    return causal_entropy(m, y_groups, x_groups);
}

double TrajectoryLaw::directed_info_rate() const {
    const int all[3] = {0, 1, 2};
    return (output_entropy() - causally_conditioned_entropy(all)) /
           static_cast<double>(horizon_);
}

JointPmf build_trajectory_pmf(const TableChannel& channel,
                              const std::array<CausalPolicy, 3>& policies, int horizon,
                              std::uint64_t cap) {
    return TrajectoryLaw(channel, policies, horizon, cap).full_joint();
}

}  // namespace macfb
