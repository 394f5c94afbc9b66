#include "cbf/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "cbf/csv.hpp"

static_assert(std::endian::native == std::endian::little,
              "field container assumes a little-endian host");

namespace cbf {

namespace {

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw InvalidArgument("read_field: truncated container");
    return v;
}

} // namespace

void write_field(std::ostream& os, const VelocityField& f) {
    put<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid.n));
    put<double>(os, f.grid.box_length);
    put<std::uint64_t>(os, 2);
    for (int c = 0; c < 2; ++c)
        for (const auto& v : f.comp[c]) {
            put<double>(os, v.real());
            put<double>(os, v.imag());
        }
}

VelocityField read_field(std::istream& is) {
    TorusGrid g;
    g.n = static_cast<int>(get<std::uint64_t>(is));
    g.box_length = get<double>(is);
    const auto ncomp = get<std::uint64_t>(is);
    if (ncomp != 2) throw InvalidArgument("read_field: expected 2 components");
    g.validate();
    VelocityField f = VelocityField::zero(g);
    for (int c = 0; c < 2; ++c)
        for (auto& v : f.comp[c]) {
            const double re = get<double>(is);
            const double im = get<double>(is);
            v = {re, im};
        }
    return f;
}

void save_field(const std::string& path, const VelocityField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("save_field: cannot open " + path);
    write_field(os, f);
}

VelocityField load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("load_field: cannot open " + path);
    return read_field(is);
}

std::string field_to_csv(const VelocityField& f) {
    csv::Writer w({"m1", "m2", "u1_re", "u1_im", "u2_re", "u2_im"});
    const int n = f.grid.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            w.row(f.grid.mode(i), f.grid.mode(j), f.at(0, i, j).real(), f.at(0, i, j).imag(),
                  f.at(1, i, j).real(), f.at(1, i, j).imag());
    return w.str();
}

} // namespace cbf
