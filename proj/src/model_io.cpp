#include "condnet/model_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "condnet/errors.hpp"

namespace condnet {

namespace {

template <typename Derived>
void write_array(std::ostream& out, const std::string& key, const Eigen::DenseBase<Derived>& a, bool matrix) {
    out << key << '[';
    if (matrix) {
        out << a.rows() << ',' << a.cols();
    } else {
        out << a.size();
    }
    out << "] =";
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out << ' ' << format_double17(a(i, j));
    }
    out << '\n';
}

struct Entry {
    std::vector<Eigen::Index> shape;  // empty for scalars
    std::string value;
};

std::string_view strip(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

class Entries {
public:
    explicit Entries(std::istream& in) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto text = strip(line);
            if (text.empty() || text.front() == '#') continue;
            const auto eq = text.find('=');
            if (eq == std::string_view::npos) {
                throw ModelFormatError("model line " + std::to_string(line_no) + ": expected 'key = value'");
            }
            auto key = std::string(strip(text.substr(0, eq)));
            Entry e;
            e.value = std::string(strip(text.substr(eq + 1)));
            if (const auto open = key.find('['); open != std::string::npos) {
                if (key.back() != ']') throw ModelFormatError("model line " + std::to_string(line_no) + ": bad shape");
                std::stringstream dims(key.substr(open + 1, key.size() - open - 2));
                std::string dim;
                while (std::getline(dims, dim, ',')) {
                    Eigen::Index n = -1;
                    const auto [p, ec] = std::from_chars(dim.data(), dim.data() + dim.size(), n);
                    if (ec != std::errc() || p != dim.data() + dim.size() || n < 0) {
                        throw ModelFormatError("model line " + std::to_string(line_no) + ": bad shape");
                    }
                    e.shape.push_back(n);
                }
                key.erase(open);
            }
            if (!entries_.emplace(key, std::move(e)).second) {
                throw ModelFormatError("duplicate model key '" + key + "'");
            }
        }
    }

    const Entry& at(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw ModelFormatError("model file lacks '" + key + "'");
        return it->second;
    }

    std::string text(const std::string& key) const { return at(key).value; }

    double real(const std::string& key) const {
        try {
            return parse_double(at(key).value);
        } catch (const std::invalid_argument&) {
            throw ModelFormatError("model key '" + key + "' is not a number");
        }
    }

    template <typename Int>
    Int integer(const std::string& key) const {
        const auto& v = at(key).value;
        Int n{};
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
        if (ec != std::errc() || p != v.data() + v.size()) {
            throw ModelFormatError("model key '" + key + "' is not an integer");
        }
        return n;
    }

    /// Row-major values into a rows x cols matrix; cols == -1 means a vector.
    Eigen::MatrixXd array(const std::string& key, Eigen::Index rows, Eigen::Index cols) const {
        const auto& e = at(key);
        const std::vector<Eigen::Index> expected =
            cols < 0 ? std::vector<Eigen::Index>{rows} : std::vector<Eigen::Index>{rows, cols};
        if (e.shape != expected) throw ModelFormatError("model array '" + key + "' has the wrong shape");
        const Eigen::Index c = cols < 0 ? 1 : cols;
        Eigen::MatrixXd m(rows, c);
        std::istringstream values(e.value);
        std::string token;
        Eigen::Index k = 0;
        while (values >> token) {
            if (k == rows * c) throw ModelFormatError("model array '" + key + "' has too many values");
            try {
                m(k / c, k % c) = parse_double(token);
            } catch (const std::invalid_argument&) {
                throw ModelFormatError("model array '" + key + "' holds a non-number");
            }
            ++k;
        }
        if (k != rows * c) throw ModelFormatError("model array '" + key + "' has too few values");
        return m;
    }

private:
    std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace

void save_model(const Model& m, std::ostream& out) {
    validate(m.net);
    const auto& net = m.net;
    out << "# condnet model\n";
    out << "format_version = " << kModelFormatVersion << '\n';
    out << "input_dim = " << net.input_dim() << '\n';
    out << "hidden_width = " << net.hidden_width() << '\n';
    out << "output_dim = " << net.output_dim() << '\n';
    out << "hidden_activation = " << to_string(net.hidden_activation) << '\n';
    out << "output_activation = " << to_string(net.output_activation) << '\n';
    out << "seed = " << m.seed << '\n';
    out << "train_fraction = " << format_double17(m.train_fraction) << '\n';
    out << "scaler.target_lo = " << format_double17(m.scaler.target_lo) << '\n';
    out << "scaler.target_hi = " << format_double17(m.scaler.target_hi) << '\n';
    write_array(out, "scaler.min", m.scaler.min, false);
    write_array(out, "scaler.max", m.scaler.max, false);
    write_array(out, "w1", net.w1, true);
    write_array(out, "b1", net.b1, false);
    write_array(out, "w2", net.w2, true);
    write_array(out, "b2", net.b2, false);
}

void save_model(const Model& m, const std::filesystem::path& path) {
    const auto text = model_to_string(m);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelFormatError("cannot write model file " + path.string());
    out << text;
}

std::string model_to_string(const Model& m) {
    std::ostringstream out;
    save_model(m, out);
    return out.str();
}

Model load_model(std::istream& in) {
    const Entries e(in);
    const int version = e.integer<int>("format_version");
    if (version != kModelFormatVersion) {
        throw ModelFormatError("unsupported model format version " + std::to_string(version) + " (expected " +
                               std::to_string(kModelFormatVersion) + ")");
    }
    const auto input_dim = e.integer<Eigen::Index>("input_dim");
    const auto hidden = e.integer<Eigen::Index>("hidden_width");
    const auto output_dim = e.integer<Eigen::Index>("output_dim");
    if (input_dim < 1 || hidden < 1 || output_dim != 1) throw ModelFormatError("unsupported model dimensions");

    Model m;
    m.net.hidden_activation = activation_from_string(e.text("hidden_activation"));
    m.net.output_activation = activation_from_string(e.text("output_activation"));
    m.seed = e.integer<std::uint64_t>("seed");
    m.train_fraction = e.real("train_fraction");
    m.scaler.target_lo = e.real("scaler.target_lo");
    m.scaler.target_hi = e.real("scaler.target_hi");
    m.scaler.min = e.array("scaler.min", input_dim + 1, -1);
    m.scaler.max = e.array("scaler.max", input_dim + 1, -1);
    m.net.w1 = e.array("w1", hidden, input_dim);
    m.net.b1 = e.array("b1", hidden, -1);
    m.net.w2 = e.array("w2", output_dim, hidden);
    m.net.b2 = e.array("b2", output_dim, -1);
    validate(m.net);
    if (!(m.scaler.target_lo < m.scaler.target_hi) || !(m.scaler.max.array() >= m.scaler.min.array()).all()) {
        throw ModelFormatError("model scaler parameters are inconsistent");
    }
    return m;
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelFormatError("cannot open model file " + path.string());
    return load_model(in);
}

}  // namespace condnet
