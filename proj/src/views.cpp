#include "modq/views.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace modq {

namespace {

ModqueueView identity_view(int n) {
    ModqueueView view;
    view.order.resize(static_cast<std::size_t>(n));
    std::iota(view.order.begin(), view.order.end(), ReportId{0});
    return view;
}

void require_sizes(int k, int n) {
    if (k < 1) throw std::invalid_argument("team size must be at least 1");
    if (n < 1) throw std::invalid_argument("report count must be at least 1");
}

}  // namespace

std::vector<ModqueueView> default_views(int k, int n) {
    require_sizes(k, n);
    return std::vector<ModqueueView>(static_cast<std::size_t>(k), identity_view(n));
}

std::vector<ModqueueView> reverse_split_views(int k, int n) {
    require_sizes(k, n);
    auto views = default_views(k, n);
    // Odd teams put the extra mod on the default half.
    const int forward = (k + 1) / 2;
    for (int i = forward; i < k; ++i) {
        auto& order = views[static_cast<std::size_t>(i)].order;
        std::reverse(order.begin(), order.end());
    }
    return views;
}

std::vector<ModqueueView> random_views(int k, int n, Rng& rng) {
    require_sizes(k, n);
    std::vector<ModqueueView> views;
    views.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        auto view = identity_view(n);
        rng.shuffle(std::span<ReportId>(view.order));
        views.push_back(std::move(view));
    }
    return views;
}

ModqueueView distribute_toxicity(const ModqueueView& view, std::span<const Report> reports,
                                 double tau) {
    if (view.order.empty()) return view;
    std::vector<ReportId> toxic;
    std::vector<ReportId> clean;
    for (ReportId id : view.order) {
        (is_toxic(reports[id], tau) ? toxic : clean).push_back(id);
    }

    const bool toxic_first = is_toxic(reports[view.order.front()], tau);
    const auto& lead = toxic_first ? toxic : clean;
    const auto& follow = toxic_first ? clean : toxic;

    ModqueueView out;
    out.order.reserve(view.order.size());
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < lead.size() || b < follow.size()) {
        if (a < lead.size()) out.order.push_back(lead[a++]);
        if (b < follow.size()) out.order.push_back(follow[b++]);
    }
    return out;
}

std::vector<ModqueueView> assign_views(ViewPolicy policy, int k, std::span<const Report> reports,
                                       bool distribute, double tau, Rng& rng) {
    const int n = static_cast<int>(reports.size());
    std::vector<ModqueueView> views;
    switch (policy) {
        case ViewPolicy::Default: views = default_views(k, n); break;
        case ViewPolicy::Reverse: views = reverse_split_views(k, n); break;
        case ViewPolicy::Random: views = random_views(k, n, rng); break;
    }
    if (distribute) {
        for (auto& v : views) v = distribute_toxicity(v, reports, tau);
    }
    return views;
}

}  // namespace modq
