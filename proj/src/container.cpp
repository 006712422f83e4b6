#include "chebrb/container.hpp"

#include "chebrb/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace chebrb {

namespace {

constexpr char kMagic[4] = {'C', 'H', 'R', 'B'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    template <class T>
    void put(T v) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
        out.insert(out.end(), b, b + sizeof(T));
    }
    void put(const NdArray& a) {
        for (double v : a.data()) put(v);
    }

    std::vector<std::uint8_t> out;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

    template <class T>
    T get() {
        if (pos_ + sizeof(T) > in_.size()) throw FormatError("container truncated at byte " + std::to_string(pos_));
        unsigned char b[sizeof(T)];
        std::memcpy(b, in_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
        pos_ += sizeof(T);
        T v;
        std::memcpy(&v, b, sizeof(T));
        return v;
    }
    NdArray array(std::vector<std::size_t> extents) {
        const std::size_t n = product(extents);
        if (pos_ + 8 * n > in_.size()) throw FormatError("container payload truncated");
        std::vector<double> v(n);
        for (auto& x : v) x = get<double>();
        return NdArray(std::move(extents), std::move(v));
    }
    bool done() const noexcept { return pos_ == in_.size(); }

private:
    const std::vector<std::uint8_t>& in_;
    std::size_t pos_ = 0;
};

void put_header(Writer& w, ContainerKind kind, const Domain& d, const std::vector<std::size_t>& degrees) {
    for (char c : kMagic) w.put(static_cast<std::uint8_t>(c));
    w.put(kVersion);
    w.put(static_cast<std::uint8_t>(kind));
    if (degrees.size() > 255) throw DimensionError("container supports at most 255 dimensions");
    w.put(static_cast<std::uint8_t>(degrees.size()));
    for (std::size_t j = 0; j < degrees.size(); ++j) {
        w.put(static_cast<std::uint32_t>(degrees[j]));
        w.put(d[j].min);
        w.put(d[j].max);
    }
}

}  // namespace

ContainerKind kind_of(const Polynomial& p) {
    if (const auto* i = std::get_if<Interpolant>(&p)) {
        return i->is_split() ? ContainerKind::split : ContainerKind::full;
    }
    return ContainerKind::reduced;
}

std::vector<std::uint8_t> serialize(const Polynomial& p) {
    Writer w;
    const auto kind = kind_of(p);
    if (const auto* i = std::get_if<Interpolant>(&p)) {
        put_header(w, kind, i->domain(), i->degrees());
        if (kind == ContainerKind::full) {
            w.put(i->coeffs());
        } else {
            const auto& s = i->split_storage();
            w.put(static_cast<std::uint8_t>(s.axis));
            for (const auto& slice : s.slices) w.put(slice);
        }
    } else {
        const auto& q = std::get<ReducedPolynomial>(p);
        put_header(w, kind, q.domain(), q.degrees());
        for (auto m : q.retained()) w.put(static_cast<std::uint32_t>(m));
        for (const auto& a : q.levels()) w.put(a);
    }
    return std::move(w.out);
}

Polynomial parse_container(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    for (char c : kMagic) {
        if (r.get<std::uint8_t>() != static_cast<std::uint8_t>(c)) throw FormatError("bad magic, not a CHRB file");
    }
    if (const auto v = r.get<std::uint32_t>(); v != kVersion) {
        throw FormatError("unsupported container version " + std::to_string(v));
    }
    const auto kind = r.get<std::uint8_t>();
    const std::size_t n = r.get<std::uint8_t>();
    if (n == 0) throw FormatError("container declares zero dimensions");
    std::vector<std::size_t> degrees(n);
    std::vector<Bounds> bounds(n);
    for (std::size_t j = 0; j < n; ++j) {
        degrees[j] = r.get<std::uint32_t>();
        bounds[j].min = r.get<double>();
        bounds[j].max = r.get<double>();
    }
    Domain domain(bounds);
    std::vector<std::size_t> ext(n);
    for (std::size_t j = 0; j < n; ++j) ext[j] = degrees[j] + 1;

    auto finish = [&](Polynomial p) {
        if (!r.done()) throw FormatError("trailing bytes after container payload");
        return p;
    };
    switch (static_cast<ContainerKind>(kind)) {
        case ContainerKind::full:
            return finish(Interpolant(domain, r.array(ext)));
        case ContainerKind::reduced: {
            std::vector<std::size_t> retained(n);
            for (auto& m : retained) m = r.get<std::uint32_t>();
            std::vector<NdArray> levels;
            std::vector<std::size_t> prefix;
            for (std::size_t j = 0; j < n; ++j) {
                if (retained[j] > degrees[j]) throw FormatError("retained count exceeds degree");
                auto e = prefix;
                if (j + 1 < n) e.push_back(retained[j] + 1);
                e.push_back(degrees[j] + 1);
                levels.push_back(r.array(e));
                prefix.push_back(retained[j] + 1);
            }
            return finish(ReducedPolynomial(domain, degrees, retained, std::move(levels)));
        }
        case ContainerKind::split: {
            const std::size_t axis = r.get<std::uint8_t>();
            if (axis >= n || n < 2) throw FormatError("split axis out of range");
            auto e = ext;
            e.erase(e.begin() + static_cast<std::ptrdiff_t>(axis));
            SplitStorage s{axis, {}};
            for (std::size_t k = 0; k <= degrees[axis]; ++k) s.slices.push_back(r.array(e));
            return finish(Interpolant(domain, degrees, std::move(s)));
        }
    }
    throw FormatError("unknown container kind " + std::to_string(kind));
}

void write_container(const std::filesystem::path& path, const Polynomial& p) {
    const auto bytes = serialize(p);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw FormatError("write failed for " + path.string());
}

Polynomial read_container(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_container(bytes);
}

std::uint64_t full_tensor_bytes(const std::vector<std::size_t>& degrees) {
    std::uint64_t s = 8;
    for (auto N : degrees) s *= N + 1;
    return s;
}

}  // namespace chebrb
