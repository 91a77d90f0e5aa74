#ifndef RADSHOCK_CLI_HPP
#define RADSHOCK_CLI_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace radshock {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAdmissibility = 3;
inline constexpr int kExitNumerical = 4;

// Flat key=value run configuration. Values from --key flags override file
// values. Lines starting with or containing '#' are stripped from there.
struct RunConfig {
    std::string mode;  // profile | regularity | system | evolve | verify
    std::map<std::string, std::string> kv;

    static RunConfig from_file(const std::string& mode, const std::string& path);

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& def) const;
    double num(const std::string& key) const;
    double num_or(const std::string& key, double def) const;
    int integer(const std::string& key) const;
    int integer_or(const std::string& key, int def) const;
    std::vector<double> vec(const std::string& key) const;  // comma-separated
};

// Write `content` to `path` atomically (temp file in the same directory,
// then rename).
void write_atomic(const std::string& path, const std::string& content);

// 17-significant-digit numeric formatting shared by all report writers.
std::string format17(double x);

// Execute one configuration (including `sweep` fan-out) and return the
// process exit code; error text goes to stderr.
int run_config(const RunConfig& cfg);

}  // namespace radshock

#endif
