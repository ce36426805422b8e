#include "pansr/datagen/catalog.hpp"

#include <stdexcept>
#include <string>

namespace pansr::datagen {

namespace {

expr::EquationSpec make(std::string name, std::string text, std::vector<std::string> names, double lo, double hi)
{
    expr::EquationSpec spec;
    spec.name = std::move(name);
    spec.expression = std::move(text);
    spec.bounds.assign(names.size(), expr::Bounds { lo, hi });
    spec.variable_names = std::move(names);
    spec.validate();
    return spec;
}

std::vector<expr::EquationSpec> build()
{
    return {
        make("friedman", "10*sin(pi*x1*x2) + 20*(x3-0.5)**2 + 10*x4 + 5*x5", { "x1", "x2", "x3", "x4", "x5" }, 0.0, 1.0),
        make("feynman_I_6_2a", "exp(-theta**2/2)/sqrt(2*pi)", { "theta" }, 1.0, 3.0),
        make("feynman_I_12_1", "mu*Nn", { "mu", "Nn" }, 1.0, 5.0),
        make("feynman_I_12_4", "q1/(4*pi*epsilon*r**2)", { "q1", "epsilon", "r" }, 1.0, 5.0),
        make("feynman_I_14_3", "m*g*z", { "m", "g", "z" }, 1.0, 5.0),
        make("feynman_I_34_27", "(h/(2*pi))*omega", { "omega", "h" }, 1.0, 5.0),
        make("feynman_I_38_12", "4*pi*epsilon*(h/(2*pi))**2/(m*q**2)", { "m", "q", "h", "epsilon" }, 1.0, 5.0),
        make("feynman_I_39_1", "3/2*pr*V", { "pr", "V" }, 1.0, 5.0),
        make("feynman_II_3_24", "Pwr/(4*pi*r**2)", { "Pwr", "r" }, 1.0, 5.0),
        make("poly_sum_product", "x1 + x2*x3", { "x1", "x2", "x3" }, 1.0, 5.0),
        make("poly_quadratic", "x1**2 - x2 + 0.5*x3", { "x1", "x2", "x3" }, -1.0, 1.0),
        make("poly_pairs", "x1*x2 + x3*x4", { "x1", "x2", "x3", "x4" }, -1.0, 1.0),
        make("poly_cubic", "x1**3 + x2", { "x1", "x2" }, -1.0, 1.0),
    };
}

} // namespace

std::vector<expr::EquationSpec> const& builtin_equations()
{
    static std::vector<expr::EquationSpec> const catalog = build();
    return catalog;
}

expr::EquationSpec const& builtin_equation(std::string_view name)
{
    for (auto const& spec : builtin_equations()) {
        if (spec.name == name) {
            return spec;
        }
    }
    throw std::out_of_range("unknown built-in equation: " + std::string(name));
}

} // namespace pansr::datagen
