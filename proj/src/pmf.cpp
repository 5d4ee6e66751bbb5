#include "macfb/pmf.hpp"

#include <algorithm>
#include <cmath>

namespace macfb {

namespace {

double plogp_sum(std::span<const double> probs) {
    double h = 0;
    for (double p : probs)
        if (p > 0) h -= p * std::log2(p);
    return h;
}

std::vector<std::string> set_union(std::vector<std::string> a,
                                   const std::vector<std::string>& b) {
    for (const auto& name : b)
        if (std::find(a.begin(), a.end(), name) == a.end()) a.push_back(name);
    return a;
}

}  // namespace

JointPmf::JointPmf(std::vector<Axis> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
    std::size_t expected = 1;
    for (const auto& ax : axes_) {
        if (ax.size < 1) throw validation_error("axis size must be positive");
        expected *= static_cast<std::size_t>(ax.size);
    }
    for (std::size_t i = 0; i < axes_.size(); ++i)
        for (std::size_t j = i + 1; j < axes_.size(); ++j)
            if (axes_[i].name == axes_[j].name)
                throw validation_error("duplicate axis name '" + axes_[i].name + "'");
    if (probs_.size() != expected)
        throw validation_error("pmf size does not match axis sizes");
    rebuild_strides();
}

JointPmf JointPmf::zeros(std::vector<Axis> axes) {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.size);
    return JointPmf(std::move(axes), std::vector<double>(n, 0.0));
}

void JointPmf::rebuild_strides() {
    strides_.assign(axes_.size(), 1);
    for (std::size_t i = axes_.size(); i-- > 1;)
        strides_[i - 1] = strides_[i] * static_cast<std::size_t>(axes_[i].size);
}

std::size_t JointPmf::axis_index(const std::string& name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].name == name) return i;
    throw validation_error("unknown axis '" + name + "'");
}

bool JointPmf::has_axis(const std::string& name) const {
    for (const auto& ax : axes_)
        if (ax.name == name) return true;
    return false;
}

std::size_t JointPmf::flat_index(std::span<const int> coords) const {
    if (coords.size() != axes_.size())
        throw validation_error("coordinate count does not match axis count");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] < 0 || coords[i] >= axes_[i].size)
            throw validation_error("coordinate out of range");
        idx += strides_[i] * static_cast<std::size_t>(coords[i]);
    }
    return idx;
}

double JointPmf::total_mass() const {
    double s = 0;
    for (double p : probs_) s += p;
    return s;
}

void JointPmf::validate(double tol) const {
    for (double p : probs_)
        if (!(p >= 0.0)) throw validation_error("pmf entries must be nonnegative");
    if (std::abs(total_mass() - 1.0) > tol)
        throw validation_error("pmf mass must be 1");
}

JointPmf JointPmf::marginal(const std::vector<std::string>& keep) const {
    std::vector<std::size_t> keep_idx;
    for (const auto& name : keep) keep_idx.push_back(axis_index(name));
    std::sort(keep_idx.begin(), keep_idx.end());
    keep_idx.erase(std::unique(keep_idx.begin(), keep_idx.end()), keep_idx.end());

    std::vector<Axis> out_axes;
    out_axes.reserve(keep_idx.size());
    for (std::size_t i : keep_idx) out_axes.push_back(axes_[i]);
    JointPmf out = zeros(std::move(out_axes));

    // Destination index as a linear function of source coordinates.
    std::vector<std::size_t> dst_stride(axes_.size(), 0);
    {
        std::size_t s = 1;
        for (std::size_t j = keep_idx.size(); j-- > 0;) {
            dst_stride[keep_idx[j]] = s;
            s *= static_cast<std::size_t>(axes_[keep_idx[j]].size);
        }
    }

    std::vector<int> coords(axes_.size(), 0);
    std::size_t dst = 0;
    for (std::size_t src = 0; src < probs_.size(); ++src) {
        out.probs_[dst] += probs_[src];
        // Odometer increment, updating dst incrementally.
        for (std::size_t i = axes_.size(); i-- > 0;) {
            if (++coords[i] < axes_[i].size) {
                dst += dst_stride[i];
                break;
            }
            coords[i] = 0;
            dst -= dst_stride[i] * static_cast<std::size_t>(axes_[i].size - 1);
        }
    }
    return out;
}

JointPmf JointPmf::with_derived_axis(const std::string& name, int size,
                                     const std::vector<std::string>& sources,
                                     const std::function<int(std::span<const int>)>& fn) const {
    if (has_axis(name)) throw validation_error("derived axis name already exists");
    std::vector<std::size_t> src_idx;
    for (const auto& s : sources) src_idx.push_back(axis_index(s));

    std::vector<Axis> out_axes = axes_;
    out_axes.push_back({name, size});
    JointPmf out = zeros(std::move(out_axes));

    std::vector<int> coords(axes_.size(), 0);
    std::vector<int> src_vals(src_idx.size(), 0);
    for (std::size_t src = 0; src < probs_.size(); ++src) {
        if (probs_[src] != 0.0) {
            for (std::size_t j = 0; j < src_idx.size(); ++j) src_vals[j] = coords[src_idx[j]];
            const int v = fn(src_vals);
            if (v < 0 || v >= size) throw validation_error("derived axis value out of range");
            out.probs_[src * static_cast<std::size_t>(size) + v] = probs_[src];
        }
        for (std::size_t i = axes_.size(); i-- > 0;) {
            if (++coords[i] < axes_[i].size) break;
            coords[i] = 0;
        }
    }
    return out;
}

JointPmf JointPmf::from_json(const nlohmann::json& j) {
    std::vector<Axis> axes;
    for (const auto& a : j.at("axes"))
        axes.push_back({a.at("name").get<std::string>(), a.at("size").get<int>()});
    auto probs = j.at("probs").get<std::vector<double>>();
    JointPmf p(std::move(axes), std::move(probs));
    p.validate(1e-9);
    return p;
}

nlohmann::json JointPmf::to_json() const {
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& ax : axes_) axes.push_back({{"name", ax.name}, {"size", ax.size}});
    return {{"axes", axes}, {"probs", probs_}};
}

double entropy(const JointPmf& p, const std::vector<std::string>& vars) {
    if (vars.empty()) return 0.0;
    if (vars.size() == p.rank()) {
        bool all = true;
        for (const auto& v : vars) all = all && p.has_axis(v);
        if (all) return plogp_sum(p.probs());
    }
    return plogp_sum(p.marginal(vars).probs());
}

double conditional_entropy(const JointPmf& p, const std::vector<std::string>& a,
                           const std::vector<std::string>& b) {
    return entropy(p, set_union(a, b)) - entropy(p, b);
}

double mutual_info(const JointPmf& p, const std::vector<std::string>& a,
                   const std::vector<std::string>& b, const std::vector<std::string>& cond) {
    const auto ac = set_union(a, cond);
    const auto bc = set_union(b, cond);
    const auto abc = set_union(set_union(a, b), cond);
    return entropy(p, ac) + entropy(p, bc) - entropy(p, abc) - entropy(p, cond);
}

namespace {

void check_groups(const JointPmf& p, const TimeGroups& g) {
    for (const auto& group : g)
        for (const auto& name : group) (void)p.axis_index(name);
}

TimeGroups merged_groups(const TimeGroups& a, const TimeGroups& b, std::size_t n) {
    TimeGroups out(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (t < a.size()) out[t] = a[t];
        if (t < b.size()) out[t] = set_union(out[t], b[t]);
    }
    return out;
}

}  // namespace

double causal_entropy(const JointPmf& p, const TimeGroups& y, const TimeGroups& x) {
    if (y.empty()) throw validation_error("causal entropy needs at least one output stage");
    if (!x.empty() && x.size() != y.size())
        throw validation_error("causal entropy needs matching stage counts");
    check_groups(p, y);
    check_groups(p, x);

    double total = 0;
    std::vector<std::string> past;  // Y^{k-1} plus X^{k-1}
    for (std::size_t k = 0; k < y.size(); ++k) {
        std::vector<std::string> cond = past;
        if (!x.empty()) cond = set_union(cond, x[k]);
        total += conditional_entropy(p, y[k], cond);
        past = set_union(past, y[k]);
        if (!x.empty()) past = set_union(past, x[k]);
    }
    return total;
}

double directed_info(const JointPmf& p, const TimeGroups& y, const TimeGroups& x) {
    return causal_entropy(p, y, {}) - causal_entropy(p, y, x);
}

double directed_info_conditioned(const JointPmf& p, const TimeGroups& y, const TimeGroups& x,
                                 const TimeGroups& z) {
    if (!x.empty() && !z.empty() && x.size() != z.size())
        throw validation_error("conditioned directed info needs matching stage counts");
    return causal_entropy(p, y, z) - causal_entropy(p, y, merged_groups(x, z, y.size()));
}

double normalized_directed_info(const JointPmf& p, const TimeGroups& y, const TimeGroups& x) {
    return directed_info(p, y, x) / static_cast<double>(y.size());
}

}  // namespace macfb
