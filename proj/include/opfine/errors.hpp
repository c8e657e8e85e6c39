#pragma once

#include <stdexcept>
#include <string>

namespace opfine {

/// Base class for all domain errors thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// prob-core
struct NotNormalized : Error { using Error::Error; };
struct NegativeEntry : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct SpaceMismatch : Error { using Error::Error; };
struct UnknownVariable : Error { using Error::Error; };
struct SigmaOutOfRange : Error { using Error::Error; };

// combs
struct CardinalityMismatch : Error { using Error::Error; };
struct ValueOutOfRange : Error { using Error::Error; };

// ontology
struct UnliftableComb : Error { using Error::Error; };

// assumptions / finetune-checker
struct PremiseFailed : Error { using Error::Error; };
struct NotOperationallyEquivalent : PremiseFailed { using PremiseFailed::PremiseFailed; };
struct NotOperationallyTimeSymmetric : PremiseFailed { using PremiseFailed::PremiseFailed; };
struct UnsupportedCombination : Error { using Error::Error; };

// scenarios
struct AsymmetricParams : Error { using Error::Error; };

// category-checker
struct ClosureExplosion : Error { using Error::Error; };

// cli / io
struct ParseError : Error { using Error::Error; };
struct HashMismatch : Error { using Error::Error; };
struct InvalidCertificate : Error { using Error::Error; };

}  // namespace opfine
