#pragma once

#include <stdexcept>
#include <string>

namespace fgrnn {

// Base of every library error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or unsupported input data (CLI exit code 2).
struct InputFormatError : Error {
    using Error::Error;
};

// A caller violated an operation precondition (CLI exit code 3).
struct PreconditionError : Error {
    using Error::Error;
};

// audio_io
struct MalformedWav : InputFormatError {
    using InputFormatError::InputFormatError;
};
struct UnsupportedEncoding : InputFormatError {
    using InputFormatError::InputFormatError;
};
struct EmptyClip : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct TooShort : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct WrongRate : PreconditionError {
    using PreconditionError::PreconditionError;
};

// dsp
struct BadFftSize : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct EmptySignal : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct InconsistentGeometry : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct BadConfig : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct RateMismatch : PreconditionError {
    using PreconditionError::PreconditionError;
};

// grnn / train
struct DimensionMismatch : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct NonFiniteInput : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct EmptyDataset : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct SingleClass : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct BadLabel : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct MissingClass : PreconditionError {
    using PreconditionError::PreconditionError;
};

// model_store
struct IoError : InputFormatError {
    using InputFormatError::InputFormatError;
};
struct BadMagic : InputFormatError {
    using InputFormatError::InputFormatError;
};
struct VersionMismatch : InputFormatError {
    using InputFormatError::InputFormatError;
};
struct ShapeCorruption : InputFormatError {
    using InputFormatError::InputFormatError;
};

// eval
struct LengthMismatch : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct BadIndex : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct EmptyMatrix : PreconditionError {
    using PreconditionError::PreconditionError;
};

}  // namespace fgrnn
