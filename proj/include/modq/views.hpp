#pragma once

#include <span>
#include <vector>

#include "modq/core.hpp"
#include "modq/rng.hpp"

namespace modq {

// k copies of the identity order [0, 1, ..., n-1].
std::vector<ModqueueView> default_views(int k, int n);

// Mods 0..ceil(k/2)-1 get the identity order, the rest get [n-1, ..., 0].
std::vector<ModqueueView> reverse_split_views(int k, int n);

// One independent uniform permutation per mod, drawn in mod-id order.
std::vector<ModqueueView> random_views(int k, int n, Rng& rng);

// Interleaves toxic (tox > tau) and clean reports, starting with the class of
// the view's first report and keeping the relative order within each class.
// Once one class runs out the rest of the other is appended.
ModqueueView distribute_toxicity(const ModqueueView& view, std::span<const Report> reports,
                                 double tau);

// Base views for `policy`, then distribute_toxicity on each when requested.
// Only the Random policy draws from rng.
std::vector<ModqueueView> assign_views(ViewPolicy policy, int k, std::span<const Report> reports,
                                       bool distribute, double tau, Rng& rng);

}  // namespace modq
