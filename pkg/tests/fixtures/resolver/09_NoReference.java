package com.example;

// depends: no

public class NoReference {
    public int add(int a, int b) {
        return a + b;
    }
}
