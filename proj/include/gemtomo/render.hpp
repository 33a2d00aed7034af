#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gemtomo/field.hpp"

namespace gemtomo {

struct SliceSpec {
    Axis axis = Axis::Z;
    std::size_t index = 0;
};

/// Parses "x=12", "y=0", "z=128".
SliceSpec parse_slice(const std::string& text);

/// 8-bit RGB image, row-major.
struct Image {
    std::size_t width = 0, height = 0;
    std::vector<std::uint8_t> rgb;
};

/// Hue wheel over (-pi, pi]; -pi and pi map to the same colour.
std::array<std::uint8_t, 3> phase_color(double phase);

/// Plane of `field` at the slice. Rows run along the lower-numbered remaining
/// axis, columns along the higher one.
Image render_phase(const ComplexField3D& field, const SliceSpec& s, const std::vector<std::uint8_t>* mask = nullptr);
/// Linear grayscale, black at 0 and white at the slice maximum.
Image render_magnitude(const ComplexField3D& field, const SliceSpec& s);

void write_png(const std::filesystem::path& path, const Image& img);

/// Profiles along both in-plane axes through the slice centre. Columns:
/// axis,index,coord_m,magnitude,phase_rad.
std::string slice_profiles_csv(const ComplexField3D& field, const SliceSpec& s);

} // namespace gemtomo
