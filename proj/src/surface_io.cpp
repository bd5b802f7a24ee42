#include "cleanspread/surface_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace cleanspread {

static_assert(std::endian::native == std::endian::little, "surface container assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'C', 'S', 'S', 'U', 'R', 'F', '0', '1'};

template <class T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("surface file truncated");
    return v;
}

void put_axis(std::ofstream& os, const Axis& a) {
    put<std::uint64_t>(os, a.size());
    os.write(reinterpret_cast<const char*>(a.nodes.data()), static_cast<std::streamsize>(a.size() * sizeof(double)));
}

Axis get_axis(std::ifstream& is) {
    const auto n = get<std::uint64_t>(is);
    if (n < 2 || n > (1u << 20)) throw std::runtime_error("surface file: bad axis length");
    Axis a;
    a.nodes.resize(n);
    if (!is.read(reinterpret_cast<char*>(a.nodes.data()), static_cast<std::streamsize>(n * sizeof(double))))
        throw std::runtime_error("surface file truncated");
    return a;
}

nlohmann::json axis_json(const Axis& a) { return {{"nodes", a.size()}, {"min", a.front()}, {"max", a.back()}}; }

}  // namespace

std::string checksum_hex(std::uint64_t checksum) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
    return buf;
}

void write_surface(const AllowanceSurface& s, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const Grid4& g = s.grid();
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, s.precision() == Precision::f32 ? 4u : 8u);
    for (const Axis* a : {&g.d, &g.c, &g.g, &g.e}) put_axis(os, *a);
    put<double>(os, g.dt);
    put<std::int64_t>(os, g.n_t);
    const CapParams& c = s.cap();
    for (double v : {c.penalty, c.cap, c.horizon, c.rate, c.smoothing}) put<double>(os, v);
    put<std::uint64_t>(os, s.slice_count());
    for (int k : s.slice_steps()) put<std::int64_t>(os, k);
    put<std::uint64_t>(os, s.checksum());
    if (s.precision() == Precision::f32) {
        const auto p = s.raw_f32();
        os.write(reinterpret_cast<const char*>(p.data()), static_cast<std::streamsize>(p.size_bytes()));
    } else {
        const auto p = s.raw_f64();
        os.write(reinterpret_cast<const char*>(p.data()), static_cast<std::streamsize>(p.size_bytes()));
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());

    nlohmann::json side = {
        {"format", "CSSURF01"},
        {"precision", s.precision() == Precision::f32 ? "f32" : "f64"},
        {"layout", "slot-major, then d, coal, gas, e (e fastest)"},
        {"axes", {{"demand_MWh", axis_json(g.d)}, {"coal_EUR_per_MMBtu", axis_json(g.c)},
                  {"gas_EUR_per_MMBtu", axis_json(g.g)}, {"emissions_tCO2", axis_json(g.e)}}},
        {"dt_yr", g.dt},
        {"n_t", g.n_t},
        {"cap", {{"penalty_EUR_per_t", c.penalty}, {"cap_tCO2", c.cap}, {"horizon_yr", c.horizon},
                 {"rate_per_yr", c.rate}, {"smoothing_tCO2", c.smoothing}}},
        {"slice_steps", s.slice_steps()},
        {"checksum_fnv1a64", checksum_hex(s.checksum())},
    };
    std::ofstream js(path.string() + ".json", std::ios::trunc);
    if (!js) throw std::runtime_error("cannot open sidecar for " + path.string());
    js << side.dump(2) << '\n';
}

AllowanceSurface read_surface(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw std::runtime_error(path.string() + " is not a surface container");
    const auto width = get<std::uint32_t>(is);
    if (width != 4 && width != 8) throw std::runtime_error("surface file: bad precision");
    Grid4 g;
    g.d = get_axis(is);
    g.c = get_axis(is);
    g.g = get_axis(is);
    g.e = get_axis(is);
    g.dt = get<double>(is);
    g.n_t = static_cast<int>(get<std::int64_t>(is));
    CapParams c;
    c.penalty = get<double>(is);
    c.cap = get<double>(is);
    c.horizon = get<double>(is);
    c.rate = get<double>(is);
    c.smoothing = get<double>(is);
    const auto n_slices = get<std::uint64_t>(is);
    if (n_slices < 1 || n_slices > static_cast<std::uint64_t>(g.n_t) + 1)
        throw std::runtime_error("surface file: bad slice count");
    std::vector<int> steps(n_slices);
    for (auto& k : steps) k = static_cast<int>(get<std::int64_t>(is));
    const auto expected = get<std::uint64_t>(is);

    AllowanceSurface s(g, c, width == 4 ? Precision::f32 : Precision::f64, steps);
    char* dst = width == 4 ? reinterpret_cast<char*>(s.raw_f32().data()) : reinterpret_cast<char*>(s.raw_f64().data());
    const std::size_t bytes = width == 4 ? s.raw_f32().size_bytes() : s.raw_f64().size_bytes();
    if (!is.read(dst, static_cast<std::streamsize>(bytes))) throw std::runtime_error("surface file truncated");
    if (s.checksum() != expected) throw std::runtime_error("surface file: checksum mismatch");
    return s;
}

}  // namespace cleanspread
