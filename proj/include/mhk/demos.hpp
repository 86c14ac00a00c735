#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mhk {

// Built-in demonstration scenarios.  Each prints what it computes and
// returns whether its own checks passed:
//   merge          two agents at distance epsilon average into one point
//   depart         a merged pair separates again under mixed stubbornness,
//                  while the confidence graph never changes
//   async-reduction the single-open-agent schedule reproduced as a
//                  stochastic-support schedule over singletons, bit-for-bit
//   no-termination a stubbornness ramp alpha_i(t) = 1 - 2^-t whose opinions
//                  converge yet never reach a steady state
std::vector<std::string> demo_names();

bool run_demo(const std::string& name, std::ostream& out);

}  // namespace mhk
