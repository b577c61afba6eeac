#include "fmm/builtins.hpp"

#include "fmm/errors.hpp"
#include "fmm/scheme_io.hpp"
#include "fmm/verify.hpp"

namespace fmm {

namespace {

// 23-product 3x3 scheme, coefficient-file form.
const char kStapleton59FileText[] = R"fmm(0 1 0 0 0 0 1 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0
1 0 0 0 0 0 0 -1 0 0 -1 0 1 -1 1 0 0 0 0 0 0 0 0
0 0 0 1 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 -1 0 0
0 0 1 0 1 0 0 0 0 0 0 -1 0 0 1 1 1 -1 1 0 0 0 -1
0 0 -1 0 0 0 0 0 0 1 0 0 0 0 0 -1 -1 0 -1 0 0 0 0
0 0 -1 0 -1 0 0 0 1 0 0 0 0 0 0 0 -1 0 -1 0 0 0 0
0 0 1 0 1 0 0 0 0 0 -1 -1 1 0 1 1 1 0 0 0 0 -1 -1
0 0 -1 0 0 0 0 1 0 0 1 0 -1 0 -1 -1 -1 0 0 0 0 0 0
0 0 -1 -1 -1 0 0 0 0 0 0 1 0 0 0 0 0 0 0 -1 0 1 0
#
0 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0 0 1 0 0 0 0 1
0 1 0 0 0 0 0 0 0 0 0 -1 0 0 0 0 0 1 0 -1 0 -1 0
0 0 0 0 0 0 0 -1 0 0 -1 -1 1 0 1 0 0 1 0 -1 0 -1 -1
0 0 0 0 0 0 0 0 0 1 0 0 0 1 -1 -1 0 0 0 0 0 0 1
1 0 0 0 0 0 0 0 1 0 0 -1 1 0 0 0 1 1 -1 -1 0 -1 0
0 0 0 0 0 0 0 -1 1 0 0 -1 1 0 1 1 1 1 -1 -1 0 -1 -1
0 0 0 0 1 0 0 0 -1 0 0 1 0 0 0 0 0 0 0 0 -1 0 1
0 0 0 0 0 1 0 0 -1 0 0 0 0 0 0 0 0 0 0 -1 0 0 0
0 0 1 1 0 0 0 0 -1 0 0 0 0 0 0 -1 -1 0 0 0 0 0 0
#
0 0 0 0 0 0 1 0 0 0 0 0 0 -1 0 0 0 0 0 0 1 0 0
1 1 0 0 0 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0
-1 0 -1 1 0 0 0 0 0 0 -1 0 1 0 0 0 -1 0 -1 0 0 0 0
0 0 0 0 -1 0 0 0 0 1 0 -1 0 0 0 0 0 -1 0 0 0 1 0
-1 0 0 0 1 0 0 0 -1 -1 0 1 1 1 -1 1 -1 0 0 0 0 -1 0
1 0 0 0 0 0 0 0 0 1 0 0 -1 -1 1 -1 1 0 1 0 0 0 0
0 0 0 0 0 0 0 -1 0 0 0 1 0 -1 1 0 0 1 0 0 0 -1 -1
1 0 0 0 0 0 0 1 0 0 0 0 -1 0 0 0 0 0 0 1 0 1 0
-1 0 -1 0 0 0 0 -1 0 0 0 0 1 0 0 0 -1 0 -1 0 0 0 0)fmm";

// The same algorithm before addition reduction, read literally.
const char kStapleton59NaiveText[] = R"fmm(M0 = A1 * B4
M1 = A0 * B1
M2 = (A3 - A4 - A5 + A6 - A7 - A8) * B8
M3 = (A2 - A8) * B8
M4 = (A3 - A5 + A6 - A8) * B6
M5 = A2 * B7
M6 = A0 * B0
M7 = (A1 - A7) * (B2 + B5)
M8 = A5 * (B4 + B5 - B6 - B7 - B8)
M9 = A4 * B3
M10 = (A0 - A1 - A6 + A7) * B2
M11 = (A3 + A6 - A8) * (B1 + B2 + B4 + B5 - B6)
M12 = (A1 + A6 - A7) * (B2 + B4 + B5)
M13 = A1 * B3
M14 = (A1 + A3 + A6 - A7) * (B2 - B3 + B5)
M15 = (A3 - A4 + A6 - A7) * (B3 - B5 + B8)
M16 = (A3 - A4 - A5 + A6 - A7) * (B4 + B5 - B8)
M17 = A3 * (B0 + B1 + B2 + B4 + B5)
M18 = (A3 - A4 - A5) * (B4 + B5)
M19 = A8 * (B1 + B2 + B4 + B5 + B7)
M20 = A2 * B6
M21 = (A6 - A8) * (B1 + B2 + B4 + B5)
M22 = (A3 + A6) * (B0 - B2 + B3 - B5 + B6)

C0 = M6 + M13 + M20
C1 = M0 + M1 + M5
C2 = - M0 - M2 + M3 + M10 + M12 - M16 + M18
C3 = - M4 + M9 - M11 + M17 + M21
C4 = - M0 + M4 - M8 - M9 + M11 + M12 - M13 - M14 - M15 - M16 - M21
C5 = M0 + M9 - M12 + M13 + M14 + M15 + M16 - M18
C6 = - M7 + M11 + M13 + M14 - M17 - M21 + M22
C7 = M0 + M7 - M12 + M19 + M21
C8 = - M0 - M2 - M7 + M12 - M16 + M18)fmm";

// Its 59-addition schedule.
const char kStapleton59SlpText[] = R"fmm(t0 = A3 + A6
t1 = A1 - A7
t2 = A4 + A5
t3 = A7 - t0
t4 = A6 + t1
t5 = A8 - t0
t6 = t2 + t3

u0 = B2 + B5
u1 = B4 + u0
u2 = B1 + u1
u3 = B4 + B5
u4 = B3 - u0
u5 = B8 - u3

M0 = A1 * B4
M1 = A0 * B1
M2 = (A8 + t6) * B8
M3 = (A2 - A8) * B8
M4 = (A5 + t5) * B6
M5 = A2 * B7
M6 = A0 * B0
M7 = t1 * u0
M8 = A5 * (B6 + B7 + u5)
M9 = A4 * B3
M10 = (A0 - t4) * B2
M11 = t5 * (B6 - u2)
M12 = t4 * u1
M13 = A1 * B3

M14 = (t0 + t1) * u4
M15 = (A4 + t3) * (B3 - B5 + B8)
M16 = t6 * u5
M17 = A3 * (B0 + u2)
M18 = (A3 - t2) * u3
M19 = A8 * (B7 + u2)
M20 = A2 * B6
M21 = (A6 - A8) * u2
M22 = t0 * (B0 + B6 + u4)

v0 = M0 - M12
v1 = M16 + v0
v2 = M11 - M21
v3 = M14 - M13
v4 = M18 - v1
v5 = M2 + v4
v6 = M4 + M9
v7 = M15 + v3
v8 = M17 - v2

C0 = M6 + M13 + M20
C1 = M0 + M1 + M5
C2 = M3 + M10 + v5
C3 = v6 + v8
C4 = M8 - v1 + v2 - v6 + v7
C5 = M9 - v4 - v7
C6 = - M7 + M22 - v3 - v8
C7 = M7 + M19 + M21 + v0
C8 = - M7 + v5)fmm";

// Classical 7-product 2x2 scheme, 18 additions.
const char kStrassenText[] = R"fmm(M0 = (A0 + A3) * (B0 + B3)
M1 = (A2 + A3) * B0
M2 = A0 * (B1 - B3)
M3 = A3 * (B2 - B0)
M4 = (A0 + A1) * B3
M5 = (A2 - A0) * (B0 + B1)
M6 = (A1 - A3) * (B2 + B3)
C0 = M0 + M3 - M4 + M6
C1 = M2 + M4
C2 = M1 + M3
C3 = M0 - M1 + M2 + M5)fmm";

}  // namespace

const std::vector<BuiltinInfo>& builtin_catalog() {
    static const std::vector<BuiltinInfo> catalog = {
        {"stapleton59-file", BuiltinKind::Scheme, "3x3x3 rank-23 scheme (coefficient file)"},
        {"stapleton59-naive", BuiltinKind::Scheme, "3x3x3 rank-23 scheme, unreduced literal form"},
        {"stapleton59-slp", BuiltinKind::Program, "59-addition schedule of the rank-23 3x3x3 scheme"},
        {"strassen", BuiltinKind::Scheme, "classical 2x2x2 rank-7 scheme"},
    };
    return catalog;
}

bool is_builtin(const std::string& name) {
    for (const auto& e : builtin_catalog())
        if (e.name == name) return true;
    return false;
}

const std::string& builtin_text(const std::string& name) {
    static const std::string file_text = kStapleton59FileText;
    static const std::string naive_text = kStapleton59NaiveText;
    static const std::string slp_text = kStapleton59SlpText;
    static const std::string strassen_text = kStrassenText;
    if (name == "stapleton59-file") return file_text;
    if (name == "stapleton59-naive") return naive_text;
    if (name == "stapleton59-slp") return slp_text;
    if (name == "strassen") return strassen_text;
    throw ArgError("unknown builtin '" + name + "'");
}

BilinearScheme builtin_scheme(const std::string& name) {
    if (name == "stapleton59-file") return parse_scheme(builtin_text(name), Dims{3, 3, 3}, name);
    if (name == "stapleton59-naive" || name == "strassen")
        return extract_scheme(parse_slp(builtin_text(name)));
    throw ArgError("builtin '" + name + "' is not a scheme");
}

Slp builtin_slp(const std::string& name) {
    if (name == "stapleton59-slp") return parse_slp(builtin_text(name));
    throw ArgError("builtin '" + name + "' is not a program");
}

}  // namespace fmm
