#ifndef MAGMETRO_ERRORS_HPP
#define MAGMETRO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace magmetro {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPhysicalState : Error { using Error::Error; };
struct WrongModeCount : Error { using Error::Error; };
struct InvalidParameter : Error { using Error::Error; };

struct SingularPureState : Error { using Error::Error; };
struct DisplacementNotSupported : Error { using Error::Error; };
struct StepTooSmall : Error { using Error::Error; };

struct InvalidModel : Error { using Error::Error; };
struct UnsupportedNoise : Error { using Error::Error; };
struct ZeroCoupling : Error { using Error::Error; };
struct SuperradiantPhase : Error { using Error::Error; };

struct CutoffTooSmall : Error { using Error::Error; };

struct NonPositiveData : Error { using Error::Error; };
struct TooFewPoints : Error { using Error::Error; };
struct FlatFunction : Error { using Error::Error; };

struct ConfigInvalid : Error { using Error::Error; };

} // namespace magmetro

#endif
