#ifndef FRONTDOOR_SEM_HPP
#define FRONTDOOR_SEM_HPP

#include <frontdoor/data_table.hpp>
#include <frontdoor/rng.hpp>
#include <frontdoor/smcm.hpp>

#include <string>
#include <vector>

namespace frontdoor {

enum class Regime { observational, do_t0, do_t1 };

std::string to_string(Regime r);

// Linear SEM over an SMCM. Each bidirected edge is realized by one latent
// U ~ Unif[1,2] that enters both endpoints. Every non-treatment node is
// a'(observed parents, latents) + noise_scale * N(0,1); the treatment is
// Bernoulli(sigmoid(a'(parents, latents))).
struct SemModel {
    Smcm graph;
    // Per node: weights of the observed parents in id order, followed by the
    // weights of the latents of its incident bidirected edges in sibling id
    // order.
    std::vector<std::vector<double>> weights;
    double noise_scale = 0.1;

    double parent_weight(NodeId parent, NodeId child) const;
    double latent_weight(NodeId node, NodeId sibling) const;
};

// Coefficients drawn iid Unif[lo, hi]. The graph must carry roles.
SemModel draw_model(const Smcm& g, Rng& rng, double lo = 1.0, double hi = 2.0);

// One column per graph node, named after it, in node id order.
DataTable generate(const SemModel& model, std::size_t n, Regime regime, Rng& rng);

// Sum over directed treatment-to-outcome paths of the product of the edge
// weights.
double true_ate(const SemModel& model);
// Same for an explicit pair, so graphs without roles (or with t -> y) work.
double true_ate(const SemModel& model, NodeId t, NodeId y);

struct MonteCarloEstimate {
    double value = 0;
    double std_error = 0;
};

// Mean outcome under do(T=1) minus under do(T=0), n draws each.
MonteCarloEstimate monte_carlo_ate(const SemModel& model, std::size_t n, Rng& rng);

}  // namespace frontdoor

#endif  // FRONTDOOR_SEM_HPP
