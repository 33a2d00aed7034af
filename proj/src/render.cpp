#include "gemtomo/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gemtomo/error.hpp"

namespace gemtomo {

namespace {

struct PlaneAxes {
    int row, col;
};

PlaneAxes plane_of(Axis a) {
    switch (a) {
    case Axis::X: return {1, 2};
    case Axis::Y: return {0, 2};
    case Axis::Z: return {0, 1};
    }
    return {0, 1};
}

std::size_t flat_index(const GridSpec& g, const SliceSpec& s, std::size_t r, std::size_t c) {
    const auto [ra, ca] = plane_of(s.axis);
    std::size_t idx[3];
    idx[static_cast<int>(s.axis)] = s.index;
    idx[ra] = r;
    idx[ca] = c;
    return g.index(idx[0], idx[1], idx[2]);
}

void check_slice(const ComplexField3D& f, const SliceSpec& s) {
    f.validate();
    require(s.index < f.grid.axis(static_cast<int>(s.axis)).n, "slice index out of range");
}

} // namespace

SliceSpec parse_slice(const std::string& text) {
    const auto eq = text.find('=');
    require(eq == 1 && text.size() > 2, "slice must look like x=INDEX, y=INDEX or z=INDEX");
    SliceSpec s;
    switch (text[0]) {
    case 'x': s.axis = Axis::X; break;
    case 'y': s.axis = Axis::Y; break;
    case 'z': s.axis = Axis::Z; break;
    default: throw ValidationError("slice axis must be x, y or z");
    }
    const std::string num = text.substr(2);
    require(num.find_first_not_of("0123456789") == std::string::npos, "slice index must be a non-negative integer");
    s.index = std::stoull(num);
    return s;
}

std::array<std::uint8_t, 3> phase_color(double phase) {
    // Hue in [0, 1), with -pi and pi sharing hue 0.
    double h = (phase + kPi) / kTwoPi;
    h -= std::floor(h);
    const double sector = h * 6.0;
    const int i = static_cast<int>(std::floor(sector)) % 6;
    const double f = sector - std::floor(sector);
    double r = 0, g = 0, b = 0;
    switch (i) {
    case 0: r = 1; g = f; b = 0; break;
    case 1: r = 1 - f; g = 1; b = 0; break;
    case 2: r = 0; g = 1; b = f; break;
    case 3: r = 0; g = 1 - f; b = 1; break;
    case 4: r = f; g = 0; b = 1; break;
    default: r = 1; g = 0; b = 1 - f; break;
    }
    auto q = [](double v) { return static_cast<std::uint8_t>(std::lround(255.0 * v)); };
    return {q(r), q(g), q(b)};
}

Image render_phase(const ComplexField3D& field, const SliceSpec& s, const std::vector<std::uint8_t>* mask) {
    check_slice(field, s);
    require(!mask || mask->size() == field.values.size(), "render: mask does not match field");
    const auto [ra, ca] = plane_of(s.axis);
    Image img;
    img.height = field.grid.axis(ra).n;
    img.width = field.grid.axis(ca).n;
    img.rgb.resize(img.width * img.height * 3);
    for (std::size_t r = 0; r < img.height; ++r)
        for (std::size_t c = 0; c < img.width; ++c) {
            const std::size_t idx = flat_index(field.grid, s, r, c);
            std::array<std::uint8_t, 3> px{0, 0, 0};
            if (!mask || (*mask)[idx]) px = phase_color(std::arg(field.values[idx]));
            std::copy(px.begin(), px.end(), img.rgb.begin() + static_cast<long>(3 * (r * img.width + c)));
        }
    return img;
}

Image render_magnitude(const ComplexField3D& field, const SliceSpec& s) {
    check_slice(field, s);
    const auto [ra, ca] = plane_of(s.axis);
    Image img;
    img.height = field.grid.axis(ra).n;
    img.width = field.grid.axis(ca).n;
    img.rgb.resize(img.width * img.height * 3);
    double peak = 0.0;
    for (std::size_t r = 0; r < img.height; ++r)
        for (std::size_t c = 0; c < img.width; ++c)
            peak = std::max(peak, std::abs(field.values[flat_index(field.grid, s, r, c)]));
    for (std::size_t r = 0; r < img.height; ++r)
        for (std::size_t c = 0; c < img.width; ++c) {
            const double v = peak > 0 ? std::abs(field.values[flat_index(field.grid, s, r, c)]) / peak : 0.0;
            const auto g = static_cast<std::uint8_t>(std::lround(255.0 * v));
            std::fill_n(img.rgb.begin() + static_cast<long>(3 * (r * img.width + c)), 3, g);
        }
    return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
    require(img.width > 0 && img.height > 0 && img.rgb.size() == img.width * img.height * 3, "write_png: bad image");
    FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) throw IoError("cannot open " + path.string() + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("PNG encoding of " + path.string() + " failed");
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < img.height; ++r)
        png_write_row(png, const_cast<png_bytep>(img.rgb.data() + 3 * r * img.width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fclose(fp) != 0) throw IoError("write to " + path.string() + " failed");
}

std::string slice_profiles_csv(const ComplexField3D& field, const SliceSpec& s) {
    check_slice(field, s);
    const auto [ra, ca] = plane_of(s.axis);
    const std::size_t nr = field.grid.axis(ra).n, nc = field.grid.axis(ca).n;
    const char names[3] = {'x', 'y', 'z'};
    std::ostringstream os;
    os.precision(17);
    os << "axis,index,coord_m,magnitude,phase_rad\n";
    for (std::size_t r = 0; r < nr; ++r) {
        const cdouble v = field.values[flat_index(field.grid, s, r, nc / 2)];
        os << names[ra] << ',' << r << ',' << field.grid.axis(ra).coord(r) << ',' << std::abs(v) << ',' << std::arg(v)
           << '\n';
    }
    for (std::size_t c = 0; c < nc; ++c) {
        const cdouble v = field.values[flat_index(field.grid, s, nr / 2, c)];
        os << names[ca] << ',' << c << ',' << field.grid.axis(ca).coord(c) << ',' << std::abs(v) << ',' << std::arg(v)
           << '\n';
    }
    return os.str();
}

} // namespace gemtomo
