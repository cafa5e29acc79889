#include "repeatcap/tolerances.hpp"

#include <stdexcept>

namespace repeatcap {

void Tolerances::validate() const {
    if (!(tail_rel > 0.0 && quad_abs > 0.0 && q_tol > 0.0 && kkt_tol > 0.0))
        throw std::domain_error("Tolerances: all entries must be strictly positive");
}

}  // namespace repeatcap
