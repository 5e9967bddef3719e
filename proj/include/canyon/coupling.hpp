#pragma once

#include <cstdint>

namespace canyon {

// Randomized property trials for the chain's two comparison laws. Both
// return the number of violating trials; a correct engine returns 0.

// Containment: start the full chain from a random configuration x and a
// random superset y, drive both with one shared draw sequence, and check
// x's configuration stays a sub-multiset of y's after every step.
std::uint64_t run_monotone_coupling_trials(std::uint64_t trials, std::uint64_t steps,
                                           std::uint64_t seed);

// Ordered domination: start two restricted chains whose initial particle
// lists, sorted decreasing, satisfy |x| <= |y| and x_i <= y_i, drive both
// with one shared arrival sequence, and check the same ordered domination
// after every step.
std::uint64_t run_domination_trials(std::uint64_t trials, std::uint64_t steps,
                                    std::uint64_t seed);

}  // namespace canyon
