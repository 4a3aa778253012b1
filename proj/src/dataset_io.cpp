#include "coac/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "coac/error.hpp"

namespace coac {

namespace {

std::string_view trim(std::string_view s)
{
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what)
{
    throw Error(ErrorCode::parse_error, std::string(source) + ":" + std::to_string(line) + ": " + what);
}

double parse_field(std::string_view field, std::string_view source, std::size_t line, std::string_view column)
{
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        fail(source, line, "cannot parse " + std::string(column) + " value '" + std::string(field) + "'");
    }
    if (!std::isfinite(value)) {
        fail(source, line, std::string(column) + " value is not finite");
    }
    return value;
}

} // namespace

Dataset read_dataset_csv(std::istream& in, std::string_view source)
{
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string_view> header;
    std::string header_text;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header_text = line;
            header = split_commas(header_text);
            break;
        }
    }
    if (header.empty()) {
        fail(source, line_no, "missing header (expected x,y[,y_bar])");
    }
    const bool has_y_bar = header.size() == 3;
    if (header.size() < 2 || header.size() > 3 || header[0] != "x" || header[1] != "y" ||
        (has_y_bar && header[2] != "y_bar")) {
        fail(source, line_no, "header must be x,y or x,y,y_bar");
    }

    Vector x;
    Vector y;
    Vector y_bar;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_commas(line);
        if (fields.size() != header.size()) {
            fail(source, line_no,
                 "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
        }
        x.push_back(parse_field(fields[0], source, line_no, "x"));
        y.push_back(parse_field(fields[1], source, line_no, "y"));
        if (has_y_bar) {
            y_bar.push_back(parse_field(fields[2], source, line_no, "y_bar"));
        }
    }
    if (x.size() < 2) {
        fail(source, line_no, "need at least 2 data rows, found " + std::to_string(x.size()));
    }
    std::optional<Vector> truth;
    if (has_y_bar) {
        truth = std::move(y_bar);
    }
    return Dataset(std::move(x), std::move(y), std::move(truth));
}

Dataset load_dataset_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::parse_error, "cannot open '" + path.string() + "'");
    }
    return read_dataset_csv(in, path.string());
}

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) {
        throw Error(ErrorCode::invalid_argument, "cannot format double");
    }
    return std::string(buf, ptr);
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset)
{
    const bool truth = dataset.y_bar().has_value();
    out << (truth ? "x,y,y_bar\n" : "x,y\n");
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out << format_double(dataset.x()[i]) << ',' << format_double(dataset.y()[i]);
        if (truth) {
            out << ',' << format_double((*dataset.y_bar())[i]);
        }
        out << '\n';
    }
}

} // namespace coac
