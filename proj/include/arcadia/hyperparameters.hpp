#pragma once

#include <cstddef>
#include <string>

namespace arcadia {

/// User-settable run parameters. Defaults follow the reference experiment;
/// alpha has no published value and defaults to 0.05.
struct Hyperparameters {
    std::size_t k_init_min = 5;
    std::size_t k_init_max = 15;
    std::size_t k_refine = 5;
    std::size_t t_max = 10;
    std::size_t m = 20;
    double alpha = 0.05;
    double theta_global = 0.60;
    double theta_r2 = 0.05;
    double theta_vif = 10.0;
    std::string treatment;
    std::string outcome;
    /// Lets criterion (iii) pass on a proposal's negligible-effect claim.
    bool accept_negligible_effect = false;

    /// Throws ConfigError on violated invariants.
    void validate() const;
};

} // namespace arcadia
