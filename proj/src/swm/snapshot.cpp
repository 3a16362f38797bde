#include "precflex/swm/snapshot.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "precflex/errors.hpp"

namespace precflex::swm {
namespace {

void put_le(std::ostream& os, double x) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    char buf[8];
    for (char& c : buf) {
        c = static_cast<char>(bits & 0xFF);
        bits >>= 8;
    }
    os.write(buf, 8);
}

double get_le(std::istream& is) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) {
        throw DomainError("snapshot: truncated field data");
    }
    std::uint64_t bits = 0;
    for (int k = 7; k >= 0; --k) bits = (bits << 8) | buf[k];
    return std::bit_cast<double>(bits);
}

void write_field(std::ostream& os, const char* name, int rows, int cols, const std::vector<double>& data) {
    os << "field " << name << ' ' << rows << ' ' << cols << " f64 le row-major\n";
    for (double x : data) put_le(os, x);
}

template <class N>
N keyed(const std::string& token, const std::string& key) {
    if (token.rfind(key + "=", 0) != 0) {
        throw DomainError("snapshot: expected " + key + "=, got '" + token + "'");
    }
    const char* first = token.data() + key.size() + 1;
    const char* last = token.data() + token.size();
    N value{};
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
        throw DomainError("snapshot: bad value in '" + token + "'");
    }
    return value;
}

std::vector<double> read_field(std::istream& is, const char* name, int rows, int cols) {
    std::string line;
    if (!std::getline(is, line)) {
        throw DomainError(std::string("snapshot: missing field ") + name);
    }
    std::istringstream hs(line);
    std::string tag, got_name, type, order, layout;
    int r = -1, c = -1;
    hs >> tag >> got_name >> r >> c >> type >> order >> layout;
    if (tag != "field" || got_name != name || type != "f64" || order != "le" || layout != "row-major") {
        throw DomainError("snapshot: bad field header '" + line + "'");
    }
    if (r != rows || c != cols) {
        throw DimensionError(std::string("snapshot: field ") + name + " has shape " + std::to_string(r) + "x" +
                             std::to_string(c) + ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    std::vector<double> data(static_cast<std::size_t>(rows) * cols);
    for (double& x : data) x = get_le(is);
    return data;
}

}  // namespace

void write_snapshot(std::ostream& os, const Snapshot& snap) {
    const Layout L(snap.nx, snap.ny);
    if (snap.u.size() != L.u_size() || snap.v.size() != L.v_size() || snap.eta.size() != L.eta_size()) {
        throw DimensionError("snapshot: field sizes do not match nx, ny");
    }
    std::ostringstream t;
    t << std::setprecision(17) << snap.t;
    os << "swm-snapshot v1 nx=" << snap.nx << " ny=" << snap.ny << " t=" << t.str() << " fields=3\n";
    write_field(os, "u", snap.nx + 1, snap.ny, snap.u);
    write_field(os, "v", snap.nx, snap.ny + 1, snap.v);
    write_field(os, "eta", snap.nx, snap.ny, snap.eta);
    if (!os) {
        throw ResourceError("snapshot: write failed");
    }
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw ResourceError("cannot open " + path + " for writing");
    }
    write_snapshot(os, snap);
}

Snapshot read_snapshot(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw DomainError("snapshot: empty stream");
    }
    std::istringstream hs(line);
    std::string magic, version, nx_tok, ny_tok, t_tok, fields_tok;
    hs >> magic >> version >> nx_tok >> ny_tok >> t_tok >> fields_tok;
    if (magic != "swm-snapshot" || version != "v1") {
        throw DomainError("snapshot: not an swm-snapshot v1 stream");
    }
    Snapshot s;
    s.nx = keyed<int>(nx_tok, "nx");
    s.ny = keyed<int>(ny_tok, "ny");
    s.t = keyed<double>(t_tok, "t");
    if (keyed<int>(fields_tok, "fields") != 3 || s.nx < 1 || s.ny < 1) {
        throw DomainError("snapshot: bad header '" + line + "'");
    }
    s.u = read_field(is, "u", s.nx + 1, s.ny);
    s.v = read_field(is, "v", s.nx, s.ny + 1);
    s.eta = read_field(is, "eta", s.nx, s.ny);
    return s;
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw ResourceError("cannot open " + path);
    }
    return read_snapshot(is);
}

}  // namespace precflex::swm
