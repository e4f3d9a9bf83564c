#include <doctest.h>

#include <algorithm>
#include <map>

#include "modq/views.hpp"

using namespace modq;

namespace {

using Order = std::vector<ReportId>;

// Reports whose toxicity is 1 where the mask says 'T'.
std::vector<Report> reports_from(const std::string& mask) {
    std::vector<Report> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        out.push_back({static_cast<ReportId>(i), 5, mask[i] == 'T' ? 1.0 : 0.0});
    return out;
}

std::string classes(const ModqueueView& view, const std::vector<Report>& reports) {
    std::string s;
    for (auto id : view.order) s += is_toxic(reports[id], 0.5) ? 'T' : 'C';
    return s;
}

}  // namespace

TEST_CASE("default views are identity copies") {
    const auto v = default_views(3, 4);
    REQUIRE(v.size() == 3);
    for (const auto& view : v) CHECK(view.order == Order{0, 1, 2, 3});
    CHECK(default_views(1, 1).front().order == Order{0});

    const auto ten = default_views(10, 100);
    CHECK(ten.size() == 10);
    CHECK(std::all_of(ten.begin(), ten.end(), [&](const auto& x) { return x == ten.front(); }));
    CHECK_THROWS_AS(default_views(0, 4), std::invalid_argument);
}

TEST_CASE("reverse split views") {
    auto v = reverse_split_views(2, 3);
    CHECK(v[0].order == Order{0, 1, 2});
    CHECK(v[1].order == Order{2, 1, 0});

    v = reverse_split_views(3, 3);
    CHECK(v[0].order == Order{0, 1, 2});
    CHECK(v[1].order == Order{0, 1, 2});
    CHECK(v[2].order == Order{2, 1, 0});

    v = reverse_split_views(1, 5);
    REQUIRE(v.size() == 1);
    CHECK(v[0].order == Order{0, 1, 2, 3, 4});

    for (int k = 2; k <= 10; k += 2) {
        const auto views = reverse_split_views(k, 7);
        const auto forward = std::count_if(views.begin(), views.end(),
                                           [](const auto& x) { return x.order.front() == 0; });
        CHECK(forward == k / 2);
    }
}

TEST_CASE("random views: single report and fixed-seed golden output") {
    Rng rng(1);
    for (const auto& v : random_views(4, 1, rng)) CHECK(v.order == Order{0});

    Rng a(2024);
    const auto views = random_views(2, 3, a);
    Rng b(2024);
    CHECK(random_views(2, 3, b) == views);
    // Recorded from the reference stream (mt19937_64 + Lemire + Fisher-Yates).
    CHECK(views[0].order == Order{0, 2, 1});
    CHECK(views[1].order == Order{1, 2, 0});
}

TEST_CASE("random views are uniform over the 6 permutations of 3") {
    Rng rng(77);
    std::map<Order, int> counts;
    const int draws = 6000;
    for (int i = 0; i < draws; ++i) counts[random_views(1, 3, rng).front().order]++;
    REQUIRE(counts.size() == 6);
    // Chi-square with 5 degrees of freedom; 20.52 is the 0.999 quantile.
    double chi2 = 0.0;
    for (const auto& [order, c] : counts) {
        const double expected = draws / 6.0;
        chi2 += (c - expected) * (c - expected) / expected;
        // Each cell within 3 binomial sd of 1000.
        CHECK(std::abs(c - expected) <= 3.0 * std::sqrt(draws * (1.0 / 6) * (5.0 / 6)));
    }
    CHECK(chi2 < 20.52);
}

TEST_CASE("distribute_toxicity interleaves by class") {
    {
        const auto reports = reports_from("TTCC");
        const auto out = distribute_toxicity(ModqueueView{{0, 1, 2, 3}}, reports, 0.5);
        CHECK(out.order == Order{0, 2, 1, 3});
        CHECK(classes(out, reports) == "TCTC");
    }
    {
        const auto reports = reports_from("TTTT");
        const ModqueueView view{{3, 1, 0, 2}};
        CHECK(distribute_toxicity(view, reports, 0.5) == view);
    }
    {
        const auto reports = reports_from("CTTTC");
        const auto out = distribute_toxicity(ModqueueView{{0, 1, 2, 3, 4}}, reports, 0.5);
        CHECK(out.order == Order{0, 1, 4, 2, 3});
        CHECK(classes(out, reports) == "CTCTT");
    }
}

TEST_CASE("assign_views composes policy and distribution") {
    const auto reports = reports_from("TTTCCCTC");
    Rng rng(5);
    auto plain = assign_views(ViewPolicy::Default, 3, reports, false, 0.5, rng);
    CHECK(plain == default_views(3, 8));

    auto dist = assign_views(ViewPolicy::Default, 3, reports, true, 0.5, rng);
    for (const auto& v : dist) {
        CHECK(v == dist.front());
        CHECK(classes(v, reports) == "TCTCTCTC");
    }

    Rng r1(11), r2(11);
    const auto random_dist = assign_views(ViewPolicy::Random, 2, reports, true, 0.5, r1);
    const auto base = random_views(2, 8, r2);
    REQUIRE(random_dist.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(random_dist[i] == distribute_toxicity(base[i], reports, 0.5));
        CHECK(random_dist[i].is_permutation_of(8));
    }
    CHECK(random_dist[0] != random_dist[1]);

    const auto rev = assign_views(ViewPolicy::Reverse, 4, reports, false, 0.5, rng);
    CHECK(rev == reverse_split_views(4, 8));
}
