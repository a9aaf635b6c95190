#include "fronfix/errors.hpp"

#include <sstream>

namespace fronfix {

namespace {

std::string pivot_message(std::size_t row, double pivot) {
    std::ostringstream os;
    os << "singular pivot " << pivot << " at row " << row;
    return os.str();
}

std::string denominator_message(int step, double denominator, double floor) {
    std::ostringstream os;
    os << "free-boundary denominator " << denominator << " below floor " << floor
       << " at step " << step;
    return os.str();
}

std::string convergence_message(int step, int iterations, double last, double previous) {
    std::ostringstream os;
    os.precision(17);
    os << "free-boundary iteration did not converge at step " << step << " after "
       << iterations << " iterations (last " << last << ", previous " << previous << ")";
    return os.str();
}

}  // namespace

SingularPivotError::SingularPivotError(std::size_t row, double pivot)
    : NumericalError(pivot_message(row, pivot)), row_(row), pivot_(pivot) {}

DenominatorNearZeroError::DenominatorNearZeroError(int step, double denominator, double floor)
    : NumericalError(denominator_message(step, denominator, floor), step),
      denominator_(denominator),
      floor_(floor) {}

NonConvergenceError::NonConvergenceError(int step, int iterations, double last, double previous)
    : NumericalError(convergence_message(step, iterations, last, previous), step),
      iterations_(iterations),
      last_(last),
      previous_(previous) {}

}  // namespace fronfix
