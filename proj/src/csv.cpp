#include "chaleval/csv.hpp"

#include "chaleval/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chaleval {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text)
{
    std::vector<std::vector<std::string>> rows;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        if (!line.empty()) {
            std::vector<std::string> row;
            std::size_t p = 0;
            for (;;) {
                const auto comma = line.find(',', p);
                row.emplace_back(trim(line.substr(p, comma == std::string_view::npos ? std::string_view::npos : comma - p)));
                if (comma == std::string_view::npos)
                    break;
                p = comma + 1;
            }
            rows.push_back(std::move(row));
        }
        pos = end + 1;
    }
    return rows;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(ErrorCode::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_csv(ss.str());
}

std::optional<int> parse_int(std::string_view s)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals)
{
    char buf[64];
    if (v == 0.0)
        v = 0.0; // no "-0.0"
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s(buf);
    if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error(ErrorCode::io, "cannot write " + path.string());
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os)
        throw Error(ErrorCode::io, "write failed for " + path.string());
}

} // namespace chaleval
