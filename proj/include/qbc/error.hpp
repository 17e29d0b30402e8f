// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qbc {

enum class Errc {
    NotNormalized,
    DimensionMismatch,
    InvalidState,
    BadPriors,
    ReducedStatesDiffer,
    BadGeometry,
    BadPdf,
    NegativeTime,
    BadSpecies,
    ConfigInvalid,
    MissingRecords,
    MalformedUnveil,
    TooFewSamples,
    BadArgs,
    BadEpsilon,
    ImpossibleAttack,
    Parse,
};

inline const char* to_string(Errc code) {
    switch (code) {
        case Errc::NotNormalized: return "NotNormalized";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::InvalidState: return "InvalidState";
        case Errc::BadPriors: return "BadPriors";
        case Errc::ReducedStatesDiffer: return "ReducedStatesDiffer";
        case Errc::BadGeometry: return "BadGeometry";
        case Errc::BadPdf: return "BadPdf";
        case Errc::NegativeTime: return "NegativeTime";
        case Errc::BadSpecies: return "BadSpecies";
        case Errc::ConfigInvalid: return "ConfigInvalid";
        case Errc::MissingRecords: return "MissingRecords";
        case Errc::MalformedUnveil: return "MalformedUnveil";
        case Errc::TooFewSamples: return "TooFewSamples";
        case Errc::BadArgs: return "BadArgs";
        case Errc::BadEpsilon: return "BadEpsilon";
        case Errc::ImpossibleAttack: return "ImpossibleAttack";
        case Errc::Parse: return "Parse";
    }
    return "Unknown";
}

/// Base exception for the library; `code()` identifies the failure class.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised when two states have different B marginals, so no local unitary on
/// A can map one to the other. Carries the trace distance between marginals.
class ReducedStatesDiffer : public Error {
public:
    explicit ReducedStatesDiffer(double distance)
        : Error(Errc::ReducedStatesDiffer,
                "reduced states on B differ, trace distance " + std::to_string(distance)),
          distance_(distance) {}

    double distance() const noexcept { return distance_; }

private:
    double distance_;
};

}  // namespace qbc
