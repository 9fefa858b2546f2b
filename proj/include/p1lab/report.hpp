#pragma once

// CSV emission: comma-separated, \n line endings, a header row, and
// #-prefixed comment lines carrying the config echo and the timestamp.
// Every numeric cell is printed with 12 significant digits; exact
// rationals travel as separate numerator/denominator columns.  Bodies are
// byte-stable for a fixed (config, seed): anything run-dependent stays in
// the comments.

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace p1lab {

inline std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
    }

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void config_echo(const std::map<std::string, std::string>& kv) {
        for (const auto& [k, v] : kv) out_ << "# " << k << " = " << v << "\n";
    }

    void header(const std::vector<std::string>& cols) { row_strings(cols); }

    void row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

} // namespace p1lab
