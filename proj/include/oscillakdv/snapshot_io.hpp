#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "oscillakdv/field.hpp"

namespace oscillakdv {

// Snapshot files: versioned header + n little-endian 64-bit physical samples.
// Checkpoints additionally carry the exact spectral state and step index so a
// resumed run is bitwise identical to an uninterrupted one.

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; add byte swapping for this platform");

inline void put_u32(std::ofstream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
inline void put_u64(std::ofstream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
inline void put_i32(std::ofstream& os, int32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
inline void put_f64(std::ofstream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

inline uint32_t get_u32(std::ifstream& is) { uint32_t v; is.read(reinterpret_cast<char*>(&v), 4); return v; }
inline uint64_t get_u64(std::ifstream& is) { uint64_t v; is.read(reinterpret_cast<char*>(&v), 8); return v; }
inline int32_t get_i32(std::ifstream& is) { int32_t v; is.read(reinterpret_cast<char*>(&v), 4); return v; }
inline double get_f64(std::ifstream& is) { double v; is.read(reinterpret_cast<char*>(&v), 8); return v; }

constexpr char snapshot_magic[8] = {'O', 'K', 'D', 'V', 'S', 'N', 'A', 'P'};
constexpr char checkpoint_magic[8] = {'O', 'K', 'D', 'V', 'C', 'K', 'P', 'T'};
constexpr uint32_t format_version = 1;

// write to a temp file, then rename: a crash never leaves a torn artifact
class AtomicFile {
public:
    explicit AtomicFile(const std::string& path)
        : final_path_(path), tmp_path_(path + ".tmp"),
          os_(tmp_path_, std::ios::binary | std::ios::trunc) {
        if (!os_) throw IoError("cannot open " + tmp_path_ + " for writing");
    }
    std::ofstream& stream() { return os_; }
    void commit() {
        os_.flush();
        if (!os_) throw IoError("write failed for " + tmp_path_);
        os_.close();
        std::filesystem::rename(tmp_path_, final_path_);
    }

private:
    std::string final_path_, tmp_path_;
    std::ofstream os_;
};

} // namespace detail

struct SnapshotMeta {
    double time = 0.0;
    int k = 0;
    uint64_t coefficient_digest = 0;
    uint32_t n = 0;
    double domain_length = 0.0;
};

inline void write_snapshot(const std::string& path, const Field& field, double time, int k,
                           uint64_t coefficient_digest) {
    const Field p = to_physical(field);
    const auto& g = *p.grid();
    detail::AtomicFile file(path);
    auto& os = file.stream();
    os.write(detail::snapshot_magic, 8);
    detail::put_u32(os, detail::format_version);
    detail::put_u32(os, static_cast<uint32_t>(g.size()));
    detail::put_f64(os, g.domain_length());
    detail::put_f64(os, time);
    detail::put_i32(os, k);
    detail::put_u64(os, coefficient_digest);
    os.write(reinterpret_cast<const char*>(p.samples().data()),
             static_cast<std::streamsize>(p.samples().size() * sizeof(double)));
    file.commit();
}

inline std::pair<Field, SnapshotMeta> load_snapshot(const std::string& path,
                                                    GridPtr grid = nullptr) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, detail::snapshot_magic, 8) != 0)
        throw IoError(path + ": not a snapshot file");
    SnapshotMeta meta;
    const uint32_t version = detail::get_u32(is);
    if (version != detail::format_version)
        throw IoError(path + ": unsupported format version " + std::to_string(version));
    meta.n = detail::get_u32(is);
    meta.domain_length = detail::get_f64(is);
    meta.time = detail::get_f64(is);
    meta.k = detail::get_i32(is);
    meta.coefficient_digest = detail::get_u64(is);
    if (grid) {
        if (static_cast<uint32_t>(grid->size()) != meta.n ||
            grid->domain_length() != meta.domain_length)
            throw ConfigError(path + ": snapshot grid (" + std::to_string(meta.n) +
                              " points) does not match the configured grid");
    } else {
        grid = make_grid(static_cast<int>(meta.n), meta.domain_length);
    }
    std::vector<double> samples(meta.n);
    is.read(reinterpret_cast<char*>(samples.data()),
            static_cast<std::streamsize>(samples.size() * sizeof(double)));
    if (!is) throw IoError(path + ": truncated payload");
    return {Field::from_samples(std::move(grid), std::move(samples)), meta};
}

inline Field load_snapshot_field(const std::string& path, const GridPtr& grid) {
    return load_snapshot(path, grid).first;
}

struct Checkpoint {
    uint64_t config_digest = 0;
    int32_t step_index = 0;
    double time = 0.0;
    uint32_t n = 0;
    double domain_length = 0.0;
    uint32_t scalar_rows = 0;     // CSV rows durable at this point
    uint32_t snapshot_count = 0;  // snapshot files durable at this point
    double initial_h1 = 0.0;      // growth-detector baseline of the original run
    std::vector<std::complex<double>> state;
};

inline void write_checkpoint(const std::string& path, const Checkpoint& cp) {
    detail::AtomicFile file(path);
    auto& os = file.stream();
    os.write(detail::checkpoint_magic, 8);
    detail::put_u32(os, detail::format_version);
    detail::put_u64(os, cp.config_digest);
    detail::put_i32(os, cp.step_index);
    detail::put_f64(os, cp.time);
    detail::put_u32(os, cp.n);
    detail::put_f64(os, cp.domain_length);
    detail::put_u32(os, cp.scalar_rows);
    detail::put_u32(os, cp.snapshot_count);
    detail::put_f64(os, cp.initial_h1);
    os.write(reinterpret_cast<const char*>(cp.state.data()),
             static_cast<std::streamsize>(cp.state.size() * sizeof(std::complex<double>)));
    file.commit();
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, detail::checkpoint_magic, 8) != 0)
        throw IoError(path + ": not a checkpoint file");
    const uint32_t version = detail::get_u32(is);
    if (version != detail::format_version)
        throw IoError(path + ": unsupported format version " + std::to_string(version));
    Checkpoint cp;
    cp.config_digest = detail::get_u64(is);
    cp.step_index = detail::get_i32(is);
    cp.time = detail::get_f64(is);
    cp.n = detail::get_u32(is);
    cp.domain_length = detail::get_f64(is);
    cp.scalar_rows = detail::get_u32(is);
    cp.snapshot_count = detail::get_u32(is);
    cp.initial_h1 = detail::get_f64(is);
    cp.state.resize(cp.n);
    is.read(reinterpret_cast<char*>(cp.state.data()),
            static_cast<std::streamsize>(cp.state.size() * sizeof(std::complex<double>)));
    if (!is) throw IoError(path + ": truncated payload");
    return cp;
}

} // namespace oscillakdv
