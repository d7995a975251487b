#pragma once

// File formats: phantom JSON, the TCTS sinogram and TCTV volume binaries
// (little-endian), profile CSV, PGM slices and JSON metric reports.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "geometry.hpp"
#include "metrics.hpp"
#include "phantom.hpp"
#include "sinogram.hpp"

namespace tat {

inline constexpr std::array<char, 4> sinogram_magic = {'T', 'C', 'T', 'S'};
inline constexpr std::array<char, 4> volume_magic = {'T', 'C', 'T', 'V'};
inline constexpr std::uint32_t format_version = 1;

namespace detail {

class ByteWriter
{
  public:
    void bytes(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v)
    {
        for (int b = 0; b < 4; ++b)
            buf_.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
    }
    void u64(std::uint64_t v)
    {
        for (int b = 0; b < 8; ++b)
            buf_.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    const std::vector<char>& buffer() const { return buf_; }

  private:
    std::vector<char> buf_;
};

class ByteReader
{
  public:
    ByteReader(std::vector<char> data, std::string path) : buf_(std::move(data)), path_(std::move(path)) {}

    void need(std::size_t n) const
    {
        if (pos_ + n > buf_.size())
            throw IoError(path_ + ": unexpected end of file");
    }
    std::array<char, 4> magic()
    {
        need(4);
        std::array<char, 4> m{};
        std::copy_n(buf_.begin() + static_cast<std::ptrdiff_t>(pos_), 4, m.begin());
        pos_ += 4;
        return m;
    }
    std::uint8_t u8()
    {
        need(1);
        return static_cast<std::uint8_t>(buf_[pos_++]);
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * b);
        return v;
    }
    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * b);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    float f32() { return std::bit_cast<float>(u32()); }
    bool at_end() const { return pos_ == buf_.size(); }
    const std::string& path() const { return path_; }

  private:
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::string path_;
};

inline std::vector<char> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(path.string() + ": cannot open for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const char* data, std::size_t n)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError(path.string() + ": cannot open for writing");
    out.write(data, static_cast<std::streamsize>(n));
    if (!out)
        throw IoError(path.string() + ": write failed");
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    write_file(path, text.data(), text.size());
}

}  // namespace detail

// --- sinogram -------------------------------------------------------------

inline std::vector<char> encode_sinogram(const Sinogram& s)
{
    detail::ByteWriter w;
    w.bytes(sinogram_magic.data(), 4);
    w.u32(format_version);
    w.u32(static_cast<std::uint32_t>(s.n_phi()));
    w.u32(static_cast<std::uint32_t>(s.n_theta()));
    w.u32(static_cast<std::uint32_t>(s.n_r()));
    w.f64(s.radial().r_max());
    for (double x : s.grid().theta_rule().nodes)
        w.f64(x);
    for (double x : s.grid().theta_rule().weights)
        w.f64(x);
    for (auto a : s.mask().flags())
        w.u8(a);
    for (double x : s.data())
        w.f64(x);
    return w.buffer();
}

inline Sinogram decode_sinogram(std::vector<char> bytes, const std::string& path = "<memory>")
{
    detail::ByteReader r(std::move(bytes), path);
    if (r.magic() != sinogram_magic)
        throw IoError(path + ": not a TCTS sinogram file");
    if (const auto v = r.u32(); v != format_version)
        throw IoError(path + ": unsupported sinogram version " + std::to_string(v));
    const std::size_t n_phi = r.u32();
    const std::size_t n_theta = r.u32();
    const std::size_t n_r = r.u32();
    const double r_max = r.f64();
    if (n_phi < 4 || n_theta < 2 || n_r < 2 || !(r_max > 0.0))
        throw IoError(path + ": invalid sinogram header");
    // Guard against absurd sizes before allocating.
    r.need(n_theta * 16 + n_phi * n_theta + n_phi * n_theta * n_r * 8);

    QuadratureRule rule;
    rule.a = 0.0;
    rule.b = pi;
    rule.nodes.resize(n_theta);
    rule.weights.resize(n_theta);
    for (auto& x : rule.nodes)
        x = r.f64();
    for (auto& x : rule.weights)
        x = r.f64();
    for (std::size_t j = 0; j < n_theta; ++j)
    {
        const bool ordered = j == 0 || rule.nodes[j] > rule.nodes[j - 1];
        if (!(rule.nodes[j] > 0.0 && rule.nodes[j] < pi && ordered && rule.weights[j] > 0.0))
            throw IoError(path + ": polar nodes must increase inside (0, pi) with positive weights");
    }

    std::vector<std::uint8_t> flags(n_phi * n_theta);
    for (auto& f : flags)
    {
        f = r.u8();
        if (f > 1)
            throw IoError(path + ": mask bytes must be 0 or 1");
    }

    Sinogram s(TransducerGrid(n_phi, std::move(rule)), RadialGrid(n_r, r_max));
    s.set_mask(ScanMask(n_phi, n_theta, std::move(flags)));
    for (double& x : s.data())
    {
        x = r.f64();
        if (!std::isfinite(x))
            throw IoError(path + ": non-finite sinogram sample");
    }
    if (!r.at_end())
        throw IoError(path + ": trailing bytes after sinogram data");
    return s;
}

inline void write_sinogram(const std::filesystem::path& path, const Sinogram& s)
{
    const auto bytes = encode_sinogram(s);
    detail::write_file(path, bytes.data(), bytes.size());
}

inline Sinogram read_sinogram(const std::filesystem::path& path)
{
    return decode_sinogram(detail::read_file(path), path.string());
}

// --- volume ---------------------------------------------------------------

/// Voxel data is stored as f32; everything else round-trips exactly.
inline std::vector<char> encode_volume(const Volume& v)
{
    detail::ByteWriter w;
    w.bytes(volume_magic.data(), 4);
    w.u32(format_version);
    w.u32(static_cast<std::uint32_t>(v.dim()));
    w.f64(v.spacing());
    const Vec3 o = Volume::origin();
    w.f64(o.x);
    w.f64(o.y);
    w.f64(o.z);
    for (double x : v.data())
        w.f32(static_cast<float>(x));
    return w.buffer();
}

inline Volume decode_volume(std::vector<char> bytes, const std::string& path = "<memory>")
{
    detail::ByteReader r(std::move(bytes), path);
    if (r.magic() != volume_magic)
        throw IoError(path + ": not a TCTV volume file");
    if (const auto v = r.u32(); v != format_version)
        throw IoError(path + ": unsupported volume version " + std::to_string(v));
    const std::size_t dim = r.u32();
    if (dim < 1)
        throw IoError(path + ": invalid volume dimension");
    Volume v(dim);
    const double spacing = r.f64();
    const Vec3 origin{r.f64(), r.f64(), r.f64()};
    if (spacing != v.spacing() || !(origin == Volume::origin()))
        throw IoError(path + ": volume must span [-1, 1]^3 with spacing 2/dim");
    r.need(dim * dim * dim * 4);
    for (double& x : v.data())
        x = static_cast<double>(r.f32());
    if (!r.at_end())
        throw IoError(path + ": trailing bytes after volume data");
    return v;
}

inline void write_volume(const std::filesystem::path& path, const Volume& v)
{
    const auto bytes = encode_volume(v);
    detail::write_file(path, bytes.data(), bytes.size());
}

inline Volume read_volume(const std::filesystem::path& path)
{
    return decode_volume(detail::read_file(path), path.string());
}

// --- phantoms -------------------------------------------------------------

inline nlohmann::json phantom_to_json(const Phantom& ph)
{
    auto arr = nlohmann::json::array();
    for (const auto& e : ph.ellipsoids())
        arr.push_back({{"center", {e.center.x, e.center.y, e.center.z}},
                       {"semiaxes", {e.semiaxes.x, e.semiaxes.y, e.semiaxes.z}},
                       {"amplitude", e.amplitude}});
    return arr;
}

inline Phantom phantom_from_json(const nlohmann::json& j)
{
    if (!j.is_array())
        throw InvalidArgument("phantom description must be a JSON array");
    const auto vec3 = [](const nlohmann::json& a, const char* field) {
        if (!a.is_array() || a.size() != 3)
            throw InvalidArgument(std::string("phantom field '") + field + "' must be an array of 3 numbers");
        return Vec3{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
    };
    std::vector<Ellipsoid> list;
    for (const auto& item : j)
    {
        if (!item.is_object() || !item.contains("center") || !item.contains("semiaxes"))
            throw InvalidArgument("each phantom entry needs 'center' and 'semiaxes'");
        Ellipsoid e;
        e.center = vec3(item["center"], "center");
        e.semiaxes = vec3(item["semiaxes"], "semiaxes");
        e.amplitude = item.value("amplitude", 1.0);
        list.push_back(e);
    }
    return Phantom(std::move(list));
}

inline Phantom read_phantom(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError(path.string() + ": cannot open phantom file");
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception& ex)
    {
        throw IoError(path.string() + ": invalid JSON: " + ex.what());
    }
    try
    {
        return phantom_from_json(j);
    }
    catch (const nlohmann::json::exception& ex)
    {
        throw InvalidArgument(path.string() + ": " + ex.what());
    }
}

inline void write_phantom(const std::filesystem::path& path, const Phantom& ph)
{
    detail::write_text(path, phantom_to_json(ph).dump(2) + "\n");
}

namespace detail {

inline std::vector<double> parse_numbers(std::string_view text, std::string_view what)
{
    std::vector<double> out;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ','))
    {
        try
        {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        }
        catch (const std::exception&)
        {
            throw InvalidArgument("bad number '" + item + "' in " + std::string(what));
        }
    }
    return out;
}

}  // namespace detail

/**
 * Phantom from a command-line spec:
 *   defrise | empty | ball:cx,cy,cz,radius[,amp] |
 *   ellipsoid:cx,cy,cz,ex,ey,ez[,amp] | path/to/phantom.json
 */
inline Phantom parse_phantom_spec(std::string_view spec)
{
    if (spec == "defrise")
        return defrise_phantom();
    if (spec == "empty")
        return Phantom{};
    if (spec.starts_with("ball:"))
    {
        const auto v = detail::parse_numbers(spec.substr(5), "ball spec");
        if (v.size() != 4 && v.size() != 5)
            throw InvalidArgument("ball spec needs cx,cy,cz,radius[,amplitude]");
        return ball_phantom({v[0], v[1], v[2]}, v[3], v.size() == 5 ? v[4] : 1.0);
    }
    if (spec.starts_with("ellipsoid:"))
    {
        const auto v = detail::parse_numbers(spec.substr(10), "ellipsoid spec");
        if (v.size() != 6 && v.size() != 7)
            throw InvalidArgument("ellipsoid spec needs cx,cy,cz,ex,ey,ez[,amplitude]");
        return Phantom({{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v.size() == 7 ? v[6] : 1.0}});
    }
    return read_phantom(std::filesystem::path(spec));
}

// --- text outputs ---------------------------------------------------------

inline std::string format_g9(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x == 0.0 ? 0.0 : x);  // no "-0"
    return buf;
}

inline std::string profile_csv(const LineProfile& p)
{
    static constexpr const char* names[] = {"x", "y", "z"};
    std::string out = std::string(names[static_cast<int>(p.axis)]) + ",value\n";
    for (std::size_t m = 0; m < p.values.size(); ++m)
        out += format_g9(p.coords[m]) + "," + format_g9(p.values[m]) + "\n";
    return out;
}

/// Plane slice through the nearest voxel layer; the first image axis is the
/// lower-numbered remaining axis.
struct Slice
{
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values;  // row-major, rows along the second axis
};

inline Slice extract_slice(const Volume& v, Axis normal, double at)
{
    const std::size_t layer = nearest_voxel(v, at);
    const std::size_t n = v.dim();
    Slice s{n, n, std::vector<double>(n * n)};
    for (std::size_t row = 0; row < n; ++row)
        for (std::size_t col = 0; col < n; ++col)
        {
            double x = 0.0;
            switch (normal)
            {
            case Axis::x: x = v(layer, col, row); break;
            case Axis::y: x = v(col, layer, row); break;
            case Axis::z: x = v(col, row, layer); break;
            }
            // Image rows run top to bottom, so flip the vertical axis.
            s.values[(n - 1 - row) * n + col] = x;
        }
    return s;
}

/// Binary 8-bit PGM; values are mapped linearly from [min, max] to [0, 255]
/// and the window is recorded in a header comment.
inline std::string slice_pgm(const Slice& s)
{
    const auto [lo_it, hi_it] = std::minmax_element(s.values.begin(), s.values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::string out = "P5\n# window min=" + format_g9(lo) + " max=" + format_g9(hi) + "\n"
                    + std::to_string(s.width) + " " + std::to_string(s.height) + "\n255\n";
    const double range = hi - lo;
    for (double x : s.values)
    {
        const double u = range > 0.0 ? (x - lo) / range : 0.0;
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(u, 0.0, 1.0) * 255.0))));
    }
    return out;
}

}  // namespace tat
