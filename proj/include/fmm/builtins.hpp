// fmm: bundled schemes and schedules.
#pragma once

#include <string>
#include <vector>

#include "fmm/scheme.hpp"
#include "fmm/slp.hpp"

namespace fmm {

enum class BuiltinKind : std::uint8_t { Scheme, Program };

struct BuiltinInfo {
    std::string name;
    BuiltinKind kind;
    std::string description;
};

/// Catalog entries, in listing order:
///   stapleton59-file   3x3x3 rank-23 scheme, coefficient-file form
///   stapleton59-naive  the same algorithm's unreduced literal form
///   stapleton59-slp    its 59-addition schedule
///   strassen           the classical 7-product 2x2 scheme
const std::vector<BuiltinInfo>& builtin_catalog();

bool is_builtin(const std::string& name);

/// Raw embedded text: coefficient-file format for stapleton59-file,
/// program grammar for the others.
const std::string& builtin_text(const std::string& name);

/// The scheme value of a scheme-kind builtin.
BilinearScheme builtin_scheme(const std::string& name);

/// The program value of a program-kind builtin.
Slp builtin_slp(const std::string& name);

}  // namespace fmm
