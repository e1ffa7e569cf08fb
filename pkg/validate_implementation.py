"""
Quick validation script: checks that the mcgroupoid modules import and that a
small worked example runs end to end.
"""
import os
import sys
from fractions import Fraction


def validate_imports():
    """Validate that all imports work correctly."""
    print("🔍 Validating imports...")

    try:
        sys.path.insert(0, os.path.dirname(__file__))

        from app.config import settings
        print(f"✅ Config import successful (schema version {settings.SCHEMA_VERSION})")

        from app.services.exact_linalg import solve_linear
        print("✅ Exact linear algebra import successful")

        from app.services.forms import PolyForm
        print("✅ Polynomial forms import successful")

        from app.services.slie import get_algebra_service
        print("✅ Algebra service import successful")

        from app.services.mc import get_groupoid_service
        print("✅ Groupoid service import successful")

        from app.services.gm import get_gm_service
        print("✅ Goldman–Millson service import successful")

        from app.main import build_parser
        print("✅ Command line import successful")

        return True

    except ImportError as e:
        print(f"❌ Import error: {e}")
        return False
    except Exception as e:
        print(f"❌ Unexpected error: {e}")
        return False


def validate_models():
    """Validate that the documents parse and build an algebra."""
    print("\n🔍 Validating models...")

    try:
        from app.models import AlgebraDocument, ElementDocument

        document = AlgebraDocument(
            schema_version=1,
            name="quadratic",
            truncation=2,
            max_arity=2,
            basis=[{"name": "x", "degree": 0, "weight": 1}, {"name": "y", "degree": 1, "weight": 2}],
            brackets=[{"inputs": ["x", "x"], "output": [{"coef": "1", "basis": "y"}]}],
        )
        algebra = document.to_algebra()
        print(f"✅ AlgebraDocument validation successful ({len(algebra.symbols)} symbols)")

        element = ElementDocument(terms=[{"coef": "1/2", "basis": "x"}]).to_element()
        print(f"✅ ElementDocument validation successful ({element})")

        return True

    except Exception as e:
        print(f"❌ Model validation error: {e}")
        return False


def validate_services():
    """Validate the worked example: an edge, its composite and a preimage."""
    print("\n🔍 Validating services...")

    try:
        from app.services.gm import get_gm_service
        from app.services.mc import get_groupoid_service, integrate_edge
        from app.services.slie import BasisSymbol, Element, InftyMorphism, SLieAlgebra, get_algebra_service

        algebra = SLieAlgebra(
            [BasisSymbol("e", -1, 1), BasisSymbol("x", 0, 1), BasisSymbol("z", 0, 2), BasisSymbol("y", 1, 2)],
            {"e": {"x": Fraction(1)}, "z": {"y": Fraction(1)}},
            {("x", "x"): {"y": Fraction(2)}, ("e", "x"): {"z": Fraction(-2)}},
            2, 2, "gauge",
        )
        report = get_algebra_service().validate_algebra(algebra)
        print(f"{'✅' if report.ok else '❌'} Jacobi check on {report.checked} words")

        first = integrate_edge(algebra, Element(), Element.basis("e"))
        second = integrate_edge(algebra, first.end, Element.basis("e"))
        composite = get_groupoid_service().compose(algebra, first, second).composite
        print(f"✅ Composite edge runs from {composite.start} to {composite.end}")

        identity = InftyMorphism.identity(algebra)
        certificate = get_gm_service().preimage(identity, first.end)
        verified = get_gm_service().verify(identity, certificate)
        print(f"{'✅' if verified.ok else '❌'} Preimage certificate verified")

        return report.ok and verified.ok

    except Exception as e:
        print(f"❌ Service validation error: {e}")
        return False


def validate_cli():
    """Validate that every subcommand is registered."""
    print("\n🔍 Validating command line...")

    try:
        from app.main import build_parser

        parser = build_parser()
        subcommands = parser._subparsers._group_actions[0].choices
        expected = ["validate", "curv", "twist", "pushforward", "shift", "reconstruct", "rectify",
                    "compose", "concatenate", "preimage", "transfer-connect", "verify",
                    "pi-abelian", "moore-homology"]

        found_all = True
        for name in expected:
            if name in subcommands:
                print(f"✅ Subcommand {name} found")
            else:
                print(f"⚠️ Subcommand {name} not found")
                found_all = False

        return found_all

    except Exception as e:
        print(f"❌ Command line validation error: {e}")
        return False


def main():
    """Run all validations."""
    print("🚀 Validating mcgroupoid")
    print("=" * 60)

    validations = [
        ("Imports", validate_imports),
        ("Models", validate_models),
        ("Services", validate_services),
        ("Command line", validate_cli)
    ]

    results = {}

    for name, validation_func in validations:
        try:
            result = validation_func()
            results[name] = result
        except Exception as e:
            print(f"❌ {name} validation failed: {e}")
            results[name] = False

    # Summary
    print("\n" + "=" * 60)
    print("VALIDATION SUMMARY")
    print("=" * 60)

    passed = sum(1 for result in results.values() if result)
    total = len(results)

    for name, result in results.items():
        status = "PASSED" if result else "FAILED"
        print(f"{name}: {status}")

    print(f"\nOverall: {passed}/{total} validations passed")

    if passed == total:
        print("🎉 All validations passed!")
        print("\n📋 Next steps:")
        print("1. Run the test suite: pytest")
        print("2. Try the command line: python run.py validate --input your_algebra.json")
    else:
        print("⚠️ Some validations failed. Please fix the issues above.")

    return passed == total


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
