#include "nshs/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "nshs/config.hpp"

static_assert(std::endian::native == std::endian::little,
              "nshs binary formats are little-endian");

namespace nshs {

int worker_count() {
    if (const char* env = std::getenv("NSHS_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

std::string sha256_hex(const void* data, std::size_t len) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int dlen = 0;
    EVP_Digest(data, len, digest, &dlen, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * dlen);
    for (unsigned i = 0; i < dlen; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw NumericalError("io: truncated file");
    return v;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("write_checkpoint: cannot open " + path.string());
    os.write("NSHS", 4);
    put<std::uint32_t>(os, 1);
    const std::string cfg = traj.config.serialize();
    put<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.size()));
    os.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(traj.kind));

    const auto& grid = *traj.front().grid();
    put<std::uint64_t>(os, static_cast<std::uint64_t>(grid.size()));
    put<double>(os, grid.ymax());
    put<double>(os, grid.nu_hint());
    for (int i = 0; i < grid.size(); ++i) put<double>(os, grid.nodes()[i]);

    put<std::uint64_t>(os, static_cast<std::uint64_t>(traj.snapshots.size()));
    for (const auto& s : traj.snapshots) {
        put<double>(os, s.time());
        put<std::uint32_t>(os, static_cast<std::uint32_t>(s.K()));
        for (int xi = -s.K(); xi <= s.K(); ++xi)
            for (int j = 0; j < grid.size(); ++j) {
                put<double>(os, s.mode(xi)[j].real());
                put<double>(os, s.mode(xi)[j].imag());
            }
    }
    if (!os) throw NumericalError("write_checkpoint: write failed for " + path.string());
}

Trajectory read_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("read_checkpoint: cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "NSHS", 4) != 0)
        throw InvalidArgument("read_checkpoint: bad magic");
    const auto version = get<std::uint32_t>(is);
    if (version != 1) throw InvalidArgument("read_checkpoint: unsupported version");
    const auto cfg_len = get<std::uint32_t>(is);
    std::string cfg_text(cfg_len, '\0');
    is.read(cfg_text.data(), cfg_len);

    Trajectory traj;
    traj.config = parse_config(cfg_text);
    traj.kind = static_cast<SolverKind>(get<std::uint32_t>(is));

    const auto n = get<std::uint64_t>(is);
    const double ymax = get<double>(is);
    const double hint = get<double>(is);
    Eigen::VectorXd nodes(static_cast<int>(n));
    for (std::uint64_t i = 0; i < n; ++i) nodes[static_cast<int>(i)] = get<double>(is);
    auto grid = YGrid::make(static_cast<int>(n), ymax, hint);
    if ((grid->nodes() - nodes).cwiseAbs().maxCoeff() > 1e-12)
        throw NumericalError("read_checkpoint: stored grid nodes do not match their parameters");

    const auto count = get<std::uint64_t>(is);
    for (std::uint64_t si = 0; si < count; ++si) {
        const double time = get<double>(is);
        const auto K = get<std::uint32_t>(is);
        VorticityState s(static_cast<int>(K), grid, time);
        for (int xi = -static_cast<int>(K); xi <= static_cast<int>(K); ++xi)
            for (std::uint64_t j = 0; j < n; ++j) {
                const double re = get<double>(is);
                const double im = get<double>(is);
                s.mode(xi)[static_cast<int>(j)] = complexd(re, im);
            }
        traj.snapshots.push_back(std::move(s));
    }
    return traj;
}

void write_kernel(const std::filesystem::path& path, const KernelMatrix& k) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("write_kernel: cannot open " + path.string());
    os.write("NSHK", 4);
    put<std::uint32_t>(os, 1);
    put<std::int64_t>(os, k.xi);
    put<double>(os, k.t);
    put<double>(os, k.nu);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(k.entries.rows()));
    for (int i = 0; i < k.entries.rows(); ++i)
        for (int j = 0; j < k.entries.cols(); ++j) put<double>(os, k.entries(i, j));
    if (!os) throw NumericalError("write_kernel: write failed");
}

KernelMatrix read_kernel(const std::filesystem::path& path,
                         std::shared_ptr<const YGrid> grid) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("read_kernel: cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "NSHK", 4) != 0) throw InvalidArgument("read_kernel: bad magic");
    if (get<std::uint32_t>(is) != 1) throw InvalidArgument("read_kernel: unsupported version");
    KernelMatrix k;
    k.kind = KernelKind::GNumeric;
    k.xi = static_cast<int>(get<std::int64_t>(is));
    k.t = get<double>(is);
    k.nu = get<double>(is);
    const auto n = get<std::uint64_t>(is);
    require(grid && grid->size() == static_cast<int>(n), "read_kernel: grid size mismatch");
    k.grid = std::move(grid);
    k.entries.resize(static_cast<int>(n), static_cast<int>(n));
    for (std::uint64_t i = 0; i < n; ++i)
        for (std::uint64_t j = 0; j < n; ++j)
            k.entries(static_cast<int>(i), static_cast<int>(j)) = get<double>(is);
    return k;
}

std::filesystem::path emit_outputs(const std::filesystem::path& out_dir,
                                   const std::vector<Artifact>& artifacts) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    try {
        nlohmann::json manifest;
        manifest["version"] = 1;
        nlohmann::json list = nlohmann::json::array();
        for (const auto& a : artifacts) {
            const fs::path p = out_dir / a.name;
            {
                std::ofstream os(p, std::ios::binary);
                if (!os) throw NumericalError("emit_outputs: cannot open " + p.string());
                os.write(a.bytes.data(), static_cast<std::streamsize>(a.bytes.size()));
                if (!os) throw NumericalError("emit_outputs: write failed for " + p.string());
            }
            written.push_back(p);
            nlohmann::json e;
            e["path"] = a.name;
            e["bytes"] = a.bytes.size();
            e["sha256"] = sha256_hex(a.bytes.data(), a.bytes.size());
            list.push_back(e);
        }
        manifest["artifacts"] = list;
        const fs::path mp = out_dir / "manifest.json";
        std::ofstream os(mp, std::ios::binary);
        const std::string text = manifest.dump(2) + "\n";
        os.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!os) throw NumericalError("emit_outputs: manifest write failed");
        return mp;
    } catch (...) {
        for (const auto& p : written) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        throw;
    }
}

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("file_sha256: cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes.data(), bytes.size());
}

}  // namespace nshs
