#pragma once

// Minimal subprocess helper for CLI tests: runs a shell command, captures
// stdout, returns the exit code.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace subprocess {

struct Result {
    int exit_code = -1;
    std::string out;
};

inline Result run(const std::string& command) {
    Result r;
    FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string cli_path() {
    const char* p = std::getenv("JUMPEULER_CLI");
    if (!p) throw std::runtime_error("JUMPEULER_CLI not set");
    return p;
}

inline std::string write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Parses "# key,value" CSV footers; returns NaN for "undefined".
inline double csv_footer(const std::string& csv, const std::string& key) {
    const std::string tag = "# " + key + ",";
    const auto pos = csv.find(tag);
    if (pos == std::string::npos) throw std::runtime_error("footer '" + key + "' not found");
    const auto end = csv.find('\n', pos);
    const std::string value = csv.substr(pos + tag.size(), end - pos - tag.size());
    if (value == "undefined") return std::nan("");
    return std::stod(value);
}

}  // namespace subprocess
