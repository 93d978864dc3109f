#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dspec {

/// Base class for every error the toolkit raises on bad input or failed
/// numerics. Anything escaping past this is a bug.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// dataset
struct ParseError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

// thermo
struct UnknownSpecies : Error { using Error::Error; };
struct EqualCharges : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };

// chargecorr
struct ConvergenceFailure : Error { using Error::Error; };

// spinham
struct InvalidSpin : Error { using Error::Error; };
struct NonHermitian : Error { using Error::Error; };

// stark
struct SingularDesign : Error { using Error::Error; };

// symmetry
struct MalformedPromotion : Error { using Error::Error; };

// cli / report
struct EmptyData : Error { using Error::Error; };

/// Non-fatal diagnostics (Fermi level outside the gap, quadrupole term
/// requested for I <= 1/2, ...). Callers pass nullptr to ignore them.
using WarningLog = std::vector<std::string>;

inline void warn(WarningLog* log, std::string message) {
    if (log) log->push_back(std::move(message));
}

}
