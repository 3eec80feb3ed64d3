#include "tdho/error.hpp"

namespace tdho {

const char* category_name(ErrorCategory c) noexcept {
    switch (c) {
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::positivity: return "positivity";
    case ErrorCategory::imaginary_frequency: return "imaginary-frequency";
    case ErrorCategory::positivity_horizon: return "positivity-horizon";
    case ErrorCategory::stiffness: return "stiffness";
    case ErrorCategory::usage: return "usage";
    case ErrorCategory::config: return "config";
    case ErrorCategory::box_overflow: return "box-overflow";
    case ErrorCategory::tolerance: return "tolerance";
    case ErrorCategory::io: return "io";
    }
    return "unknown";
}

} // namespace tdho
