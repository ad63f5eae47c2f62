// inputs: a, b
// outputs: b
// expect: ok
int calc() {
    int a = 1;
    int b = 2;
    /*<*/if (a > 0) {
        b = a + 1;
    }/*>*/
    return b;
}
