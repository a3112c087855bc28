package com.example;

import org.json.JSONException;
import org.json.JSONObject;

public class CatchParam {
    public String tryDescribe(Object bean) {
        try {
            return new JSONObject(bean).toJSONString(); // use: org.json.JSONObject#<init>/1, org.json.JSONObject#toJSONString/0
        } catch (JSONException failure) {
            return failure.getMessage(); // use: org.json.JSONException#getMessage/0
        }
    }
}
