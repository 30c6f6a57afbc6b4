// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace svdb {

enum class Errc {
    io_error,
    size_mismatch,
    non_finite_voxel,
    out_of_bounds,
    misaligned,
    empty_box,
    invalid_quality,
    bad_magic,
    version_mismatch,
    corrupt_index,
    dims_mismatch,
};

inline const char* to_string(Errc c)
{
    switch (c) {
        case Errc::io_error: return "IoError";
        case Errc::size_mismatch: return "SizeMismatch";
        case Errc::non_finite_voxel: return "NonFiniteVoxel";
        case Errc::out_of_bounds: return "OutOfBounds";
        case Errc::misaligned: return "Misaligned";
        case Errc::empty_box: return "EmptyBox";
        case Errc::invalid_quality: return "InvalidQuality";
        case Errc::bad_magic: return "BadMagic";
        case Errc::version_mismatch: return "VersionMismatch";
        case Errc::corrupt_index: return "CorruptIndex";
        case Errc::dims_mismatch: return "DimsMismatch";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace svdb
