#pragma once

#include "ac/config.hpp"

#include <string>
#include <vector>

namespace ac {

// Collects artifact bytes, writes them under the output directory and emits
// manifest.json (path, sha256, bytes per file). All pipeline output funnels
// through here so the manifest is complete by construction.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::string out_dir);
    void add(const std::string& rel_path, const std::string& bytes);
    void write_manifest(const RunConfig& config, const std::string& status,
                        const std::string& error_kind = "", const std::string& error_message = "");
    const std::string& out_dir() const { return out_dir_; }

private:
    struct Entry {
        std::string path;
        std::string sha256;
        std::size_t bytes = 0;
    };
    std::string out_dir_;
    std::vector<Entry> entries_;
};

// Runs one command end to end; returns the process exit code
// (0 ok, 2 config, 3 numerical, 4 geometry/validity).
int run_pipeline(const RunConfig& config, const std::string& out_dir);

} // namespace ac
