#include "crowder/csv.hpp"

#include "crowder/errors.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace crowder::csv {

std::vector<Row> parse(std::istream& in)
{
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    char c;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row[0].empty()))
            rows.push_back(std::move(row));
        row.clear();
    };

    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field_started && field.empty())
                quoted = true;
            else
                field.push_back(c);
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (in.peek() == '\n')
                in.get(c);
            end_row();
            break;
        case '\n':
            end_row();
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (quoted)
        throw SchemaError("unterminated quoted field");
    if (field_started || !field.empty() || !row.empty())
        end_row();
    return rows;
}

std::vector<Row> read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SchemaError("cannot open " + path);
    return parse(in);
}

std::string escape(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const Row& row)
{
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i)
            out << ',';
        out << escape(row[i]);
    }
    out << '\n';
}

}  // namespace crowder::csv
