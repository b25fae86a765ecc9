#include "fnet/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <vector>

#include "fnet/errors.hpp"
#include "fnet/rng.hpp"

namespace fnet {

namespace {

constexpr std::uint64_t kSeparationCap = 1000000;
constexpr char kCacheMagic[8] = {'F', 'N', 'E', 'T', 'D', 'S', '0', '1'};

Vector unit_row(Rng& rng, Index d) {
    Vector x(d);
    while (true) {
        for (Index j = 0; j < d; ++j) x(j) = rng.next_gaussian();
        double norm = x.norm();
        if (norm > 1e-12) return x / norm;
    }
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string slurp(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("dataset: cannot open " + path);
    std::string out;
    char buf[1 << 16];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
    std::fclose(f);
    return out;
}

void write_cache(const Dataset& data, std::uint64_t hash,
                 const std::string& cache_path) {
    std::FILE* f = std::fopen(cache_path.c_str(), "wb");
    if (!f) return;  // cache is best-effort; the CSV stays authoritative
    std::int64_t n = data.n(), d = data.d();
    std::fwrite(kCacheMagic, 1, 8, f);
    std::fwrite(&hash, 8, 1, f);
    std::fwrite(&n, 8, 1, f);
    std::fwrite(&d, 8, 1, f);
    std::fwrite(data.X.data(), sizeof(double), (size_t)data.X.size(), f);
    std::fwrite(data.y.data(), sizeof(double), (size_t)data.y.size(), f);
    std::fclose(f);
}

bool read_cache(const std::string& cache_path, std::uint64_t hash,
                Dataset& out) {
    std::FILE* f = std::fopen(cache_path.c_str(), "rb");
    if (!f) return false;
    char magic[8];
    std::uint64_t stored = 0;
    std::int64_t n = 0, d = 0;
    bool ok = std::fread(magic, 1, 8, f) == 8 &&
              std::memcmp(magic, kCacheMagic, 8) == 0 &&
              std::fread(&stored, 8, 1, f) == 1 && stored == hash &&
              std::fread(&n, 8, 1, f) == 1 && std::fread(&d, 8, 1, f) == 1 &&
              n >= 2 && d >= 1;
    if (ok) {
        out.X.resize(n, d);
        out.y.resize(n);
        ok = std::fread(out.X.data(), sizeof(double), (size_t)out.X.size(), f) ==
                 (size_t)out.X.size() &&
             std::fread(out.y.data(), sizeof(double), (size_t)out.y.size(), f) ==
                 (size_t)out.y.size();
    }
    std::fclose(f);
    return ok;
}

}  // namespace

const char* gen_mode_name(GenMode mode) {
    switch (mode) {
        case GenMode::sphere_uniform: return "sphere-uniform";
        case GenMode::sphere_separated: return "sphere-separated";
        case GenMode::teacher: return "teacher";
    }
    return "?";
}

GenMode gen_mode_from_name(const std::string& name) {
    if (name == "sphere-uniform") return GenMode::sphere_uniform;
    if (name == "sphere-separated") return GenMode::sphere_separated;
    if (name == "teacher") return GenMode::teacher;
    throw std::invalid_argument("unknown dataset mode: " + name);
}

Dataset gen_data(Index n, Index d, GenMode mode, std::uint64_t seed,
                 double min_angle_deg, Index teacher_width) {
    if (n < 2 || d < 1) throw std::invalid_argument("gen_data: need n >= 2, d >= 1");
    Dataset data;
    data.X.resize(n, d);
    Rng rows(seed);

    if (mode == GenMode::sphere_separated) {
        if (!(min_angle_deg > 0.0 && min_angle_deg < 90.0))
            throw std::invalid_argument(
                "gen_data: min_angle must be in (0, 90) degrees");
        const double max_dot =
            std::cos(min_angle_deg * std::numbers::pi / 180.0);
        Index placed = 0;
        std::uint64_t attempts = 0;
        while (placed < n) {
            if (++attempts > kSeparationCap)
                throw infeasible_separation(
                    "gen_data: no separated set after 1e6 attempts; reduce n "
                    "or min_angle");
            Vector cand = unit_row(rows, d);
            bool ok = true;
            for (Index i = 0; i < placed && ok; ++i)
                ok = data.X.row(i).dot(cand) <= max_dot;
            if (ok) data.X.row(placed++) = cand;
        }
    } else {
        for (Index i = 0; i < n; ++i) data.X.row(i) = unit_row(rows, d);
    }

    if (mode == GenMode::teacher) {
        if (teacher_width < 1)
            throw std::invalid_argument("gen_data: teacher width must be >= 1");
        Dims dims;
        dims.m = teacher_width;
        dims.d = d;
        Network hidden = init_network(Variant::dense, dims, seed + 5);
        Vector u = forward(hidden, data.X);
        data.y = u.cwiseMax(-1.0).cwiseMin(1.0);
    } else {
        data.y.resize(n);
        Rng labels(seed + 6);
        for (Index i = 0; i < n; ++i) data.y(i) = labels.next_real(-1.0, 1.0);
    }
    validate(data);
    return data;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
    validate(data);
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_dataset_csv: cannot open " + path);
    for (Index j = 0; j < data.d(); ++j) std::fprintf(f, "d%lld,", (long long)j);
    std::fprintf(f, "y\n");
    for (Index i = 0; i < data.n(); ++i) {
        for (Index j = 0; j < data.d(); ++j)
            std::fprintf(f, "%.17g,", data.X(i, j));
        std::fprintf(f, "%.17g\n", data.y(i));
    }
    std::fclose(f);
    write_cache(data, fnv1a(slurp(path)), path + ".cache");
}

Dataset read_dataset_csv(const std::string& path) {
    const std::string bytes = slurp(path);
    const std::uint64_t hash = fnv1a(bytes);
    Dataset data;
    if (read_cache(path + ".cache", hash, data)) {
        validate(data);
        return data;
    }

    // header: d0,...,d{d-1},y
    size_t eol = bytes.find('\n');
    if (eol == std::string::npos)
        throw std::runtime_error("read_dataset_csv: no header in " + path);
    Index d = 0;
    for (size_t p = 0; p < eol; ++p)
        if (bytes[p] == ',') ++d;
    if (d < 1 || bytes.compare(eol - 2, 2, ",y") != 0)
        throw std::runtime_error("read_dataset_csv: bad header in " + path);

    std::vector<double> values;
    size_t pos = eol + 1;
    while (pos < bytes.size()) {
        char* end = nullptr;
        double v = std::strtod(bytes.c_str() + pos, &end);
        if (end == bytes.c_str() + pos) break;
        values.push_back(v);
        pos = end - bytes.c_str();
        while (pos < bytes.size() && (bytes[pos] == ',' || bytes[pos] == '\n' ||
                                      bytes[pos] == '\r'))
            ++pos;
    }
    if (values.empty() || values.size() % (d + 1) != 0)
        throw std::runtime_error("read_dataset_csv: ragged rows in " + path);
    const Index n = (Index)(values.size() / (d + 1));
    data.X.resize(n, d);
    data.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) data.X(i, j) = values[i * (d + 1) + j];
        data.y(i) = values[i * (d + 1) + d];
    }
    validate(data);
    write_cache(data, hash, path + ".cache");
    return data;
}

}  // namespace fnet
