#include "gemtomo/gemt.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "gemtomo/error.hpp"

namespace gemtomo {

static_assert(std::endian::native == std::endian::little, "GEMT I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'G', 'E', 'M', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kUnitBytes = 16;
constexpr const char* kLength = "m";
constexpr const char* kWavenumber = "rad/m";
constexpr const char* kTime = "s";

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::string& what, const std::filesystem::path& path) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw IoError("GEMT " + path.string() + ": truncated while reading " + what);
    return v;
}

GemtDim dim_of(const AxisSpec& a, const char* unit) { return {a.n, a.step, a.origin, unit}; }

AxisSpec axis_of(const GemtDim& d) { return {static_cast<std::size_t>(d.n), d.step, d.origin}; }

} // namespace

std::size_t GemtArray::element_count() const {
    std::size_t n = dims.empty() ? 0 : 1;
    for (const auto& d : dims) n *= static_cast<std::size_t>(d.n);
    return n;
}

void write_gemt(const std::filesystem::path& path, const GemtArray& a) {
    require(!a.dims.empty() && a.dims.size() <= 255, "GEMT: ndim must be in [1, 255]");
    for (const auto& d : a.dims) require(d.unit.size() <= kUnitBytes, "GEMT: unit tag longer than 16 bytes");
    const std::size_t count = a.element_count();
    if (a.dtype == GemtType::UInt8)
        require(a.byte_data.size() == count, "GEMT: byte payload does not match dimensions");
    else
        require(a.complex_data.size() == count, "GEMT: complex payload does not match dimensions");

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("GEMT: cannot open " + path.string() + " for writing");
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, static_cast<std::uint8_t>(a.dtype));
    put(os, static_cast<std::uint8_t>(a.dims.size()));
    for (const auto& d : a.dims) {
        put(os, d.n);
        put(os, d.step);
        put(os, d.origin);
        char tag[kUnitBytes] = {};
        std::memcpy(tag, d.unit.data(), d.unit.size());
        os.write(tag, kUnitBytes);
    }
    switch (a.dtype) {
    case GemtType::Complex64:
        for (const auto& v : a.complex_data) {
            put(os, static_cast<float>(v.real()));
            put(os, static_cast<float>(v.imag()));
        }
        break;
    case GemtType::Complex128:
        os.write(reinterpret_cast<const char*>(a.complex_data.data()),
                 static_cast<std::streamsize>(count * sizeof(cdouble)));
        break;
    case GemtType::UInt8:
        os.write(reinterpret_cast<const char*>(a.byte_data.data()), static_cast<std::streamsize>(count));
        break;
    }
    if (!os) throw IoError("GEMT: write to " + path.string() + " failed");
}

GemtArray read_gemt(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("GEMT: cannot open " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("GEMT " + path.string() + ": bad magic, not a GEMT file");
    const auto version = get<std::uint32_t>(is, "version", path);
    if (version != kVersion)
        throw IoError("GEMT " + path.string() + ": unsupported version " + std::to_string(version));
    const auto dtype = get<std::uint8_t>(is, "dtype", path);
    if (dtype < 1 || dtype > 3) throw IoError("GEMT " + path.string() + ": unknown dtype " + std::to_string(dtype));
    const auto ndim = get<std::uint8_t>(is, "ndim", path);
    if (ndim == 0) throw IoError("GEMT " + path.string() + ": ndim is 0");

    GemtArray a;
    a.dtype = static_cast<GemtType>(dtype);
    std::size_t count = 1;
    for (int i = 0; i < ndim; ++i) {
        GemtDim d;
        const std::string which = "dimension " + std::to_string(i);
        d.n = get<std::uint64_t>(is, which, path);
        d.step = get<double>(is, which, path);
        d.origin = get<double>(is, which, path);
        char tag[kUnitBytes];
        if (!is.read(tag, kUnitBytes)) throw IoError("GEMT " + path.string() + ": truncated unit tag");
        d.unit.assign(tag, strnlen(tag, kUnitBytes));
        if (d.n == 0 || d.n > (std::numeric_limits<std::size_t>::max() / count))
            throw IoError("GEMT " + path.string() + ": invalid extent on " + which);
        count *= static_cast<std::size_t>(d.n);
        a.dims.push_back(d);
    }

    const std::size_t elem = a.dtype == GemtType::Complex64 ? 8 : (a.dtype == GemtType::Complex128 ? 16 : 1);
    const auto header_end = is.tellg();
    is.seekg(0, std::ios::end);
    const auto remaining = static_cast<std::size_t>(is.tellg() - header_end);
    is.seekg(header_end);
    if (remaining != count * elem)
        throw IoError("GEMT " + path.string() + ": payload has " + std::to_string(remaining) + " bytes, expected " +
                      std::to_string(count * elem));

    switch (a.dtype) {
    case GemtType::Complex64: {
        std::vector<float> raw(2 * count);
        is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
        a.complex_data.resize(count);
        for (std::size_t i = 0; i < count; ++i) a.complex_data[i] = {raw[2 * i], raw[2 * i + 1]};
        break;
    }
    case GemtType::Complex128:
        a.complex_data.resize(count);
        is.read(reinterpret_cast<char*>(a.complex_data.data()), static_cast<std::streamsize>(count * 16));
        break;
    case GemtType::UInt8:
        a.byte_data.resize(count);
        is.read(reinterpret_cast<char*>(a.byte_data.data()), static_cast<std::streamsize>(count));
        break;
    }
    if (!is) throw IoError("GEMT " + path.string() + ": read failed");
    return a;
}

GemtArray to_gemt(const ComplexField3D& f, GemtType dtype) {
    f.validate();
    require(dtype != GemtType::UInt8, "GEMT: a complex field needs a complex dtype");
    GemtArray a;
    a.dtype = dtype;
    for (int ax = 0; ax < 3; ++ax) a.dims.push_back(dim_of(f.grid.axis(ax), f.spectral[ax] ? kWavenumber : kLength));
    a.complex_data = f.values;
    return a;
}

GemtArray to_gemt(const KSpaceSignal& s, GemtType dtype) {
    s.validate();
    require(dtype != GemtType::UInt8, "GEMT: a signal needs a complex dtype");
    GemtArray a;
    a.dtype = dtype;
    a.dims = {dim_of(s.kx, kWavenumber), dim_of(s.ky, kWavenumber), dim_of(s.t, kTime)};
    a.complex_data = s.values;
    return a;
}

GemtArray mask_to_gemt(const GridSpec& grid, const std::vector<std::uint8_t>& mask) {
    require(mask.size() == grid.size(), "GEMT: mask does not match grid");
    GemtArray a;
    a.dtype = GemtType::UInt8;
    a.dims = {dim_of(grid.x, kLength), dim_of(grid.y, kLength), dim_of(grid.z, kLength)};
    a.byte_data = mask;
    return a;
}

GemtArray frames_to_gemt(const std::vector<FramePair>& frames, double pixel_pitch) {
    require(!frames.empty(), "GEMT: no frames to export");
    const std::size_t nx = frames.front().n_x, ny = frames.front().n_y, nf = frames.size();
    GemtArray a;
    a.dtype = GemtType::Complex128;
    a.dims = {dim_of(AxisSpec::centered(nx, pixel_pitch), kLength), dim_of(AxisSpec::centered(ny, pixel_pitch), kLength),
              GemtDim{nf, 1.0, 0.0, "frame"}};
    a.complex_data.resize(nx * ny * nf);
    for (std::size_t f = 0; f < nf; ++f) {
        require(frames[f].n_x == nx && frames[f].n_y == ny, "GEMT: frames differ in shape");
        for (std::size_t p = 0; p < nx * ny; ++p) a.complex_data[p * nf + f] = {frames[f].plus[p], frames[f].minus[p]};
    }
    return a;
}

ComplexField3D field_from_gemt(const GemtArray& a) {
    if (a.dtype == GemtType::UInt8 || a.dims.size() != 3)
        throw IoError("GEMT: expected a 3D complex field");
    ComplexField3D f;
    for (int ax = 0; ax < 3; ++ax) {
        const auto& d = a.dims[static_cast<std::size_t>(ax)];
        if (d.unit != kLength && d.unit != kWavenumber)
            throw IoError("GEMT: field axis " + std::to_string(ax) + " has unit '" + d.unit + "', expected m or rad/m");
        f.grid.axis(ax) = axis_of(d);
        f.spectral[static_cast<std::size_t>(ax)] = d.unit == kWavenumber;
        if (f.spectral[static_cast<std::size_t>(ax)]) f.dual[static_cast<std::size_t>(ax)] = f.grid.axis(ax).conjugate();
    }
    f.values = a.complex_data;
    f.validate();
    return f;
}

KSpaceSignal signal_from_gemt(const GemtArray& a) {
    if (a.dtype == GemtType::UInt8 || a.dims.size() != 3)
        throw IoError("GEMT: expected a 3D complex signal");
    if (a.dims[0].unit != kWavenumber || a.dims[1].unit != kWavenumber || a.dims[2].unit != kTime)
        throw IoError("GEMT: signal axes must carry units (rad/m, rad/m, s); got (" + a.dims[0].unit + ", " +
                      a.dims[1].unit + ", " + a.dims[2].unit + ")");
    KSpaceSignal s(axis_of(a.dims[0]), axis_of(a.dims[1]), axis_of(a.dims[2]));
    s.values = a.complex_data;
    s.validate();
    return s;
}

} // namespace gemtomo
