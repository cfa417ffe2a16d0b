#include "rcukf/model_io.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "rcukf/csv_io.hpp"
#include "rcukf/errors.hpp"

namespace rcukf {

namespace {

constexpr const char* kMagic = "rcukf-model v1";

void write_matrix_block(std::ofstream& out, const std::string& name,
                        const Eigen::MatrixXd& m) {
    out << name << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0)
                out << ' ';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

std::string expect_line(std::ifstream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line))
        throw IoError("'" + path + "': truncated model file");
    return line;
}

double header_double(const std::string& line, const std::string& key,
                     const std::string& path) {
    if (line.rfind(key + ' ', 0) != 0)
        throw IoError("'" + path + "': expected header '" + key + "'");
    return parse_double(line.substr(key.size() + 1), "'" + path + "' header " + key);
}

Eigen::MatrixXd read_matrix_block(std::ifstream& in, const std::string& name,
                                  Eigen::Index rows, Eigen::Index cols,
                                  const std::string& path) {
    if (expect_line(in, path) != name)
        throw IoError("'" + path + "': expected matrix block '" + name + "'");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        std::stringstream row(expect_line(in, path));
        std::string cell;
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!(row >> cell))
                throw IoError("'" + path + "': short row in block '" + name + "'");
            m(i, j) = parse_double(cell, "'" + path + "' block " + name);
        }
        if (row >> cell)
            throw IoError("'" + path + "': extra values in block '" + name + "'");
    }
    return m;
}

} // namespace

void save_model(const Reservoir& reservoir, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");

    out << kMagic << '\n';
    out << "reservoir_size " << reservoir.size() << '\n';
    out << "input_dim " << reservoir.input_dim() << '\n';
    out << "output_dim " << reservoir.output_dim() << '\n';
    out << "leak_rate " << format_double(reservoir.leak_rate()) << '\n';
    out << "spectral_radius " << format_double(reservoir.target_spectral_radius()) << '\n';
    out << "input_scale " << format_double(reservoir.input_scale()) << '\n';
    out << "connectivity " << format_double(reservoir.connectivity()) << '\n';
    out << "seed " << reservoir.seed() << '\n';
    out << "trained " << (reservoir.trained() ? 1 : 0) << '\n';

    write_matrix_block(out, "W_in", reservoir.input_weights());
    write_matrix_block(out, "W", Eigen::MatrixXd(reservoir.recurrent_weights()));
    if (reservoir.trained())
        write_matrix_block(out, "W_out", reservoir.readout_weights());
    out << "end\n";
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

Reservoir load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");

    if (expect_line(in, path) != kMagic)
        throw IoError("'" + path + "': not a reservoir model file");

    const auto n_r = static_cast<Eigen::Index>(header_double(expect_line(in, path),
                                                             "reservoir_size", path));
    const auto n = static_cast<Eigen::Index>(header_double(expect_line(in, path),
                                                           "input_dim", path));
    const auto m = static_cast<Eigen::Index>(header_double(expect_line(in, path),
                                                           "output_dim", path));
    ReservoirDescriptor desc;
    desc.leak_rate = header_double(expect_line(in, path), "leak_rate", path);
    desc.target_spectral_radius = header_double(expect_line(in, path), "spectral_radius", path);
    desc.input_scale = header_double(expect_line(in, path), "input_scale", path);
    desc.connectivity = header_double(expect_line(in, path), "connectivity", path);
    desc.seed = static_cast<std::uint64_t>(header_double(expect_line(in, path), "seed", path));
    desc.output_dim = static_cast<int>(m);
    const bool trained = header_double(expect_line(in, path), "trained", path) != 0.0;
    if (n_r < 1 || n < 1 || m < 1)
        throw IoError("'" + path + "': invalid dimensions in header");

    Eigen::MatrixXd w_in = read_matrix_block(in, "W_in", n_r, n, path);
    Eigen::MatrixXd w = read_matrix_block(in, "W", n_r, n_r, path);
    std::optional<Eigen::MatrixXd> w_out;
    if (trained)
        w_out = read_matrix_block(in, "W_out", m, n_r, path);
    if (expect_line(in, path) != "end")
        throw IoError("'" + path + "': missing end marker");

    return Reservoir::from_weights(std::move(w_in), w, desc, std::move(w_out));
}

} // namespace rcukf
