#pragma once
// Runs the command-line binary and captures its exit status and output.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace cli {

struct Result {
    int status = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

inline Result run(const std::string& args) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path() / "acsens_cli_runs";
    std::filesystem::create_directories(dir);
    const auto tag = std::to_string(::getpid()) + "_" + std::to_string(counter++);
    const auto out = dir / ("out_" + tag), err = dir / ("err_" + tag);
    const std::string cmd = std::string(ACSENS_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    Result r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    std::filesystem::remove(out);
    std::filesystem::remove(err);
    return r;
}

inline std::string preset(const std::string& name) { return std::string(ACSENS_SOURCE_DIR) + "/presets/" + name; }

}  // namespace cli
