// inputs: c, opened
// outputs: opened
// expect: ok
class Pool {
    void use(Conn c) {
        int opened = 0;
        /*<*/try {
            c.open();
            opened = 1;
        } finally {
            c.close();
        }/*>*/
        log(opened);
    }
}
