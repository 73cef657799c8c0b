#include "bsreduce/rng.hpp"

#include "bsreduce/normal.hpp"

namespace bsreduce {

double PathStream::normal() { return norm_inv(uniform()); }

}  // namespace bsreduce
