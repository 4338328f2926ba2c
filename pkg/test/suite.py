"""
Shared runner for the script-style test files
Runs each test function, reports [PASS]/[FAIL] and a summary
"""
import traceback


def run_suite(title, tests) -> bool:
    """Run test functions in order; a test fails by raising"""
    print(f"[TEST] {title}")
    print("=" * 50)

    results = {}
    for test in tests:
        try:
            test()
            results[test.__name__] = True
        except Exception as e:
            print(f"[FAIL] {test.__name__}: {type(e).__name__}: {e}")
            traceback.print_exc()
            results[test.__name__] = False

    print(f"\n[INFO] Test Results:")
    for name, passed in results.items():
        print(f"  {name}: {'[PASS]' if passed else '[FAIL]'}")

    all_passed = all(results.values())
    print(f"\n{'[PASS] ALL TESTS PASSED' if all_passed else '[FAIL] SOME TESTS FAILED'}")
    return all_passed
