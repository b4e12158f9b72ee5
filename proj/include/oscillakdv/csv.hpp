#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "oscillakdv/errors.hpp"

namespace oscillakdv {

// RFC-4180-style CSV with a mandatory header row. All values this project
// emits are plain numbers or bare identifiers, so quoting never triggers;
// the writer still quotes defensively if a field ever contains a delimiter.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header, bool append = false)
        : os_(path, append ? (std::ios::out | std::ios::app) : std::ios::out) {
        if (!os_) throw IoError("cannot open " + path + " for writing");
        if (!append) write_row_strings(header);
    }

    void write_row_strings(const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) os_ << ',';
            os_ << escape(fields[i]);
        }
        os_ << '\n';
        os_.flush();
    }

    void write_row(const std::vector<double>& values, const std::string& trailing = {}) {
        std::vector<std::string> fields;
        fields.reserve(values.size() + (trailing.empty() ? 0 : 1));
        for (double v : values) fields.push_back(format(v));
        if (!trailing.empty()) fields.push_back(trailing);
        write_row_strings(fields);
    }

    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

private:
    static std::string escape(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
        return out;
    }

    std::ofstream os_;
};

} // namespace oscillakdv
