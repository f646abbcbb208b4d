#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "quatsylv/instances.hpp"
#include "quatsylv/json_io.hpp"
#include "quatsylv/pinv.hpp"
#include "quatsylv/sylvester.hpp"

namespace py = pybind11;
using namespace quatsylv;

namespace {

// numpy view: shape rows + cols + [4], float64, lexicographic order
py::array_t<double> to_array(const QTensor& t) {
    std::vector<py::ssize_t> shape;
    for (auto d : t.shape().rows) shape.push_back(d);
    for (auto d : t.shape().cols) shape.push_back(d);
    shape.push_back(4);
    py::array_t<double> out(shape);
    double* p = out.mutable_data();
    for (const auto& q : t.data()) {
        *p++ = q.w;
        *p++ = q.x;
        *p++ = q.y;
        *p++ = q.z;
    }
    return out;
}

QTensor from_array(py::array_t<double, py::array::c_style | py::array::forcecast> arr,
                   int row_order) {
    const auto n = arr.ndim();
    if (n < 3 || arr.shape(n - 1) != 4)
        throw std::invalid_argument("expected an array of shape rows+cols+[4]");
    if (row_order < 1 || row_order > n - 2)
        throw std::invalid_argument("row_order out of range");
    Dims rows, cols;
    for (py::ssize_t i = 0; i < n - 1; ++i)
        (i < row_order ? rows : cols).push_back(arr.shape(i));
    QTensor t((Shape(rows, cols)));
    const double* p = arr.data();
    const std::int64_t total = t.total_rows() * t.total_cols();
    for (std::int64_t i = 0; i < total; ++i) {
        const std::int64_t r = i / t.total_cols(), c = i % t.total_cols();
        t.at(r, c) = Quaternion(p[4 * i], p[4 * i + 1], p[4 * i + 2], p[4 * i + 3]);
    }
    return t;
}

EtaAxis axis(const std::string& s) {
    if (s == "i") return EtaAxis::i;
    if (s == "j") return EtaAxis::j;
    if (s == "k") return EtaAxis::k;
    throw std::invalid_argument("eta must be i, j or k");
}

FreeParams fp_of(const std::string& policy, std::uint64_t seed) {
    if (policy == "zero") return FreeParams::zero();
    if (policy == "random") return FreeParams::random(seed);
    throw std::invalid_argument("policy must be zero or random");
}

std::string result_json(const SolveResult& res) {
    Json j;
    j["report"] = report_to_json(res.report);
    if (res.solution) j["solution"] = solution_to_json(*res.solution);
    return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "quaternion tensor algebra and coupled Sylvester-like system solvers";

    py::class_<QTensor>(m, "QTensor")
        .def_static(
            "from_array",
            [](py::array_t<double, py::array::c_style | py::array::forcecast> a,
               int row_order) { return from_array(a, row_order); },
            py::arg("array"), py::arg("row_order"))
        .def("to_array", &to_array)
        .def("fro_norm", &QTensor::fro_norm)
        .def_property_readonly("rows", [](const QTensor& t) { return t.shape().rows; })
        .def_property_readonly("cols", [](const QTensor& t) { return t.shape().cols; })
        .def("__add__", [](const QTensor& a, const QTensor& b) { return a + b; })
        .def("__sub__", [](const QTensor& a, const QTensor& b) { return a - b; })
        .def("__neg__", [](const QTensor& a) { return -a; })
        .def("scaled", &QTensor::scaled);

    m.def("identity", [](const Dims& dims) { return QTensor::identity(dims); });
    m.def("zeros",
          [](const Dims& rows, const Dims& cols) { return QTensor::zeros(Shape(rows, cols)); });
    m.def("einstein_product", &einstein_product);
    m.def("conj_transpose", &conj_transpose);
    m.def("eta_conj_transpose",
          [](const QTensor& t, const std::string& eta) {
              return eta_conj_transpose(t, axis(eta));
          });
    m.def("pinv", [](const QTensor& t, double rtol) {
              return pinv_tensor(t, RankTolerance{rtol});
          },
          py::arg("t"), py::arg("rtol") = 1e-12);
    m.def("left_projector",
          [](const QTensor& t) { return left_projector(t); });
    m.def("right_projector",
          [](const QTensor& t) { return right_projector(t); });

    // JSON-string layer: the same wire formats the CLI uses
    m.def("check_json", [](const std::string& spec_text, double tol_rank, double tol_cond) {
              const SystemSpec spec = spec_from_json(Json::parse(spec_text));
              return canonical_dump(
                  report_to_json(check_system(spec, {tol_rank, tol_cond})));
          },
          py::arg("spec"), py::arg("tol_rank") = 1e-12, py::arg("tol_cond") = 1e-9);
    m.def("solve_json",
          [](const std::string& spec_text, const std::string& policy, std::uint64_t seed,
             double tol_rank, double tol_cond) {
              const SystemSpec spec = spec_from_json(Json::parse(spec_text));
              return result_json(
                  solve_system(spec, fp_of(policy, seed), {tol_rank, tol_cond}));
          },
          py::arg("spec"), py::arg("policy") = "zero", py::arg("seed") = 0,
          py::arg("tol_rank") = 1e-12, py::arg("tol_cond") = 1e-9);
    m.def("verify_json",
          [](const std::string& spec_text, const std::string& sol_text, double tol_cond) {
              const SystemSpec spec = spec_from_json(Json::parse(spec_text));
              const Solution sol = solution_from_json(Json::parse(sol_text));
              return canonical_dump(report_to_json(verify(spec, sol, {1e-12, tol_cond})));
          },
          py::arg("spec"), py::arg("solution"), py::arg("tol_cond") = 1e-9);
    m.def("generate_json",
          [](const std::string& variant, std::uint64_t seed, std::int64_t dim, int order,
             const std::string& eta) {
              ShapeProfile p{dim, order};
              auto [spec, truth] = generate_consistent(variant_from_string(variant), p,
                                                       seed, axis(eta));
              Json j;
              j["spec"] = spec_to_json(spec);
              j["solution"] = solution_to_json(truth);
              return j.dump();
          },
          py::arg("variant"), py::arg("seed"), py::arg("dim") = 2, py::arg("order") = 2,
          py::arg("eta") = "i");
    m.def("fixture_json", [](const std::string& id) {
        auto [spec_text, sol_text] = fixture_files(id);
        Json j;
        j["spec"] = Json::parse(spec_text);
        j["solution"] = Json::parse(sol_text);
        return j.dump();
    });
}
