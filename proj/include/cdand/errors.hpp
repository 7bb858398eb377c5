#pragma once

#include <stdexcept>
#include <string>

namespace cdand {

// Base class for all library errors. Subclasses mirror the failure modes of
// the individual operations so callers can react per class.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry / solver failures.
class DegenerateGeometry : public Error { public: using Error::Error; };
class NoConvergence : public Error { public: using Error::Error; };
class EmptySet : public Error { public: using Error::Error; };
class AllZeroWeights : public Error { public: using Error::Error; };

// Ensemble construction.
class InvalidArity : public Error { public: using Error::Error; };
class TooFewValidPels : public Error { public: using Error::Error; };

// Detection.
class EmptyPartition : public Error { public: using Error::Error; };
class ZeroReference : public Error { public: using Error::Error; };

// Mixture fitting.
class DegenerateComponent : public Error { public: using Error::Error; };
class EmptyResponsibility : public Error { public: using Error::Error; };
class FitDiverged : public Error { public: using Error::Error; };

// Refinement.
class EmptyHdSet : public Error { public: using Error::Error; };

// Configuration and data ingestion.
class InvalidConfig : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };
class SchemaMismatch : public Error { public: using Error::Error; };
class InsufficientLabels : public Error { public: using Error::Error; };

}  // namespace cdand
