#include "starrad/errors.hpp"

#include <sstream>

namespace starrad {

namespace {

std::string with_location(const std::string& what, const std::vector<double>& location) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at (";
    for (std::size_t i = 0; i < location.size(); ++i) {
        if (i != 0) os << ", ";
        os << location[i];
    }
    os << ")";
    return os.str();
}

}  // namespace

EvaluationError::EvaluationError(const std::string& what, std::vector<double> location)
    : Error(with_location(what, location)), location_(std::move(location)) {}

}  // namespace starrad
