#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "groundctl/embed.hpp"
#include "groundctl/exec.hpp"
#include "groundctl/ingest.hpp"
#include "groundctl/pipeline.hpp"
#include "groundctl/store.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return GROUNDCTL_FIXTURE_DIR; }
inline fs::path manifest_path() { return fixture_dir() / "manifest.json"; }

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<groundctl::ingest::SourceDocument> fixture_documents() {
    const auto m = groundctl::exec::FixtureManifest::load(manifest_path());
    std::vector<groundctl::ingest::SourceDocument> docs;
    for (const auto& rel : m.corpus_files()) docs.push_back(groundctl::ingest::load_source(m.root / rel));
    return docs;
}

// The fixture corpus indexed with the default chunking and the local embedder.
inline groundctl::store::VectorStore fixture_store(const groundctl::embed::Embedder& e) {
    groundctl::store::VectorStore s;
    groundctl::pipeline::index_documents(s, e, fixture_documents(), {});
    return s;
}

// Scratch directory removed on scope exit.
struct TempDir {
    fs::path path;

    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("groundctl-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline std::string random_letters(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> d('a', 'z');
    std::string s(n, 'a');
    for (auto& c : s) c = static_cast<char>(d(rng));
    return s;
}

inline groundctl::embed::EmbeddingVector random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> v(dim);
    double norm = 0.0;
    for (auto& x : v) {
        x = n(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return groundctl::embed::EmbeddingVector(std::move(v));
}

}  // namespace testsupport
