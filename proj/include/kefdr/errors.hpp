#ifndef KEFDR_ERRORS_HPP
#define KEFDR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kefdr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// numerics
struct InvalidMatrix : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };

// knockoff construction
struct DegenerateColumn : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct InsufficientRows : Error { using Error::Error; };
struct InfeasibleD : Error { using Error::Error; };

// inference
struct InsufficientDF : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };

// procedures / calibrators
struct ZeroEvidence : Error { using Error::Error; };
struct BadTuning : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };

// lasso
struct LassoDiverged : Error { using Error::Error; };

// sim / data
struct NoData : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct LabelError : Error { using Error::Error; };

// cli
struct ConfigError : Error { using Error::Error; };

} // namespace kefdr

#endif
