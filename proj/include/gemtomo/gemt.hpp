#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gemtomo/field.hpp"
#include "gemtomo/heterodyne.hpp"

namespace gemtomo {

/// Payload element type codes of the GEMT container.
enum class GemtType : std::uint8_t { Complex64 = 1, Complex128 = 2, UInt8 = 3 };

struct GemtDim {
    std::uint64_t n = 0;
    double step = 1.0;
    double origin = 0.0;
    std::string unit; // at most 16 bytes

    bool operator==(const GemtDim&) const = default;
};

/// In-memory image of a GEMT file. Complex payloads live in `complex_data`,
/// byte payloads in `byte_data`.
struct GemtArray {
    GemtType dtype = GemtType::Complex128;
    std::vector<GemtDim> dims;
    std::vector<cdouble> complex_data;
    std::vector<std::uint8_t> byte_data;

    std::size_t element_count() const;
};

void write_gemt(const std::filesystem::path& path, const GemtArray& a);
GemtArray read_gemt(const std::filesystem::path& path);

/// Real-space fields carry unit "m" on each axis, transformed axes "rad/m".
GemtArray to_gemt(const ComplexField3D& f, GemtType dtype = GemtType::Complex128);
/// Signals carry units ("rad/m", "rad/m", "s").
GemtArray to_gemt(const KSpaceSignal& s, GemtType dtype = GemtType::Complex128);
/// Byte raster on the grid of a field.
GemtArray mask_to_gemt(const GridSpec& grid, const std::vector<std::uint8_t>& mask);
/// Frame stack (n_x, n_y, frame): plus frame in the real part, minus in the imaginary part.
GemtArray frames_to_gemt(const std::vector<FramePair>& frames, double pixel_pitch);

ComplexField3D field_from_gemt(const GemtArray& a);
KSpaceSignal signal_from_gemt(const GemtArray& a);

inline void write_field(const std::filesystem::path& p, const ComplexField3D& f) { write_gemt(p, to_gemt(f)); }
inline void write_signal(const std::filesystem::path& p, const KSpaceSignal& s) { write_gemt(p, to_gemt(s)); }
inline ComplexField3D read_field(const std::filesystem::path& p) { return field_from_gemt(read_gemt(p)); }
inline KSpaceSignal read_signal(const std::filesystem::path& p) { return signal_from_gemt(read_gemt(p)); }

} // namespace gemtomo
