// inputs: xs, min, max, sum
// outputs: min, max, sum
// expect: E_MULTI_OUTPUT
class Stats {
    static int run(IntList xs) {
        int min = 0;
        int max = 0;
        int sum = 0;
        /*<*/for (int x : xs) {
            min = Math.min(min, x);
            max = Math.max(max, x);
            sum += x;
        }/*>*/
        return min + max + sum;
    }
}
