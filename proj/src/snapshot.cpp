#include "codp/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace codp {

namespace {

constexpr char kMagic[8] = {'C', 'O', 'D', 'P', 'S', 'N', 'P', '1'};

template <typename Sketch>
SketchSnapshot snapshot_of(const Sketch& sk, const char* kind_cms, const char* kind_cs) {
    SketchSnapshot snap;
    snap.kind = sk.kind() == SketchKind::CountMin ? kind_cms : kind_cs;
    snap.depth = sk.depth();
    snap.width = sk.width();
    snap.t = sk.t_now();
    snap.release.reserve(static_cast<std::size_t>(snap.depth) * snap.width);
    for (int i = 0; i < snap.depth; ++i)
        for (std::uint64_t j = 0; j < snap.width; ++j) snap.release.push_back(sk.cell_release(i, j));
    return snap;
}

}  // namespace

SketchSnapshot take_snapshot(const PunctualSketch& sk) {
    return snapshot_of(sk, "punctual-cms", "punctual-cs");
}

SketchSnapshot take_snapshot(const LazySketch& sk) {
    return snapshot_of(sk, "lazy-cms", "lazy-cs");
}

std::string snapshot_to_json(const SketchSnapshot& snap) {
    nlohmann::json j;
    j["schema"] = "codp.snapshot.v1";
    j["kind"] = snap.kind;
    j["depth"] = snap.depth;
    j["width"] = snap.width;
    j["t"] = snap.t;
    j["release"] = snap.release;
    return j.dump();
}

SketchSnapshot snapshot_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema") != "codp.snapshot.v1") throw std::runtime_error("unknown snapshot schema");
    SketchSnapshot snap;
    snap.kind = j.at("kind").get<std::string>();
    snap.depth = j.at("depth").get<int>();
    snap.width = j.at("width").get<std::uint64_t>();
    snap.t = j.at("t").get<std::uint64_t>();
    snap.release = j.at("release").get<std::vector<double>>();
    if (snap.release.size() != static_cast<std::size_t>(snap.depth) * snap.width)
        throw std::runtime_error("snapshot release size mismatch");
    return snap;
}

void write_snapshot_binary(const SketchSnapshot& snap, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot: " + path);
    out.write(kMagic, sizeof(kMagic));
    const auto write_u64 = [&](std::uint64_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    };
    write_u64(snap.kind.size());
    out.write(snap.kind.data(), static_cast<std::streamsize>(snap.kind.size()));
    write_u64(static_cast<std::uint64_t>(snap.depth));
    write_u64(snap.width);
    write_u64(snap.t);
    write_u64(snap.release.size());
    out.write(reinterpret_cast<const char*>(snap.release.data()),
              static_cast<std::streamsize>(snap.release.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

SketchSnapshot read_snapshot_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kMagic)) throw std::runtime_error("bad snapshot magic");
    const auto read_u64 = [&]() {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        return v;
    };
    SketchSnapshot snap;
    snap.kind.resize(read_u64());
    in.read(snap.kind.data(), static_cast<std::streamsize>(snap.kind.size()));
    snap.depth = static_cast<int>(read_u64());
    snap.width = read_u64();
    snap.t = read_u64();
    snap.release.resize(read_u64());
    in.read(reinterpret_cast<char*>(snap.release.data()),
            static_cast<std::streamsize>(snap.release.size() * sizeof(double)));
    if (!in || snap.release.size() != static_cast<std::size_t>(snap.depth) * snap.width)
        throw std::runtime_error("truncated snapshot: " + path);
    return snap;
}

}  // namespace codp
